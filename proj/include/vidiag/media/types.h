#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vidiag/media/frame.h"

namespace vidiag::media {

enum class ToolStatus { success, fallback, failure };

const char* to_string(ToolStatus s);
std::optional<ToolStatus> tool_status_from_string(const std::string& s);

/// One tool invocation record. Failures never carry a payload; success and
/// fallback always do.
struct ToolOutcome {
  std::string tool_name;
  ToolStatus status = ToolStatus::failure;
  double latency_ms = 0.0;
  std::optional<nlohmann::json> payload;
  std::string note;

  static ToolOutcome ok(std::string name, double ms, nlohmann::json payload,
                        std::string note = "") {
    return {std::move(name), ToolStatus::success, ms, std::move(payload), std::move(note)};
  }
  static ToolOutcome degraded(std::string name, double ms, nlohmann::json payload,
                              std::string note) {
    return {std::move(name), ToolStatus::fallback, ms, std::move(payload), std::move(note)};
  }
  static ToolOutcome failed(std::string name, double ms, std::string note) {
    return {std::move(name), ToolStatus::failure, ms, std::nullopt, std::move(note)};
  }
};

struct MediaInfo {
  double duration_sec = 0.0;
  int width = 0;
  int height = 0;
  double fps = 0.0;
  bool audio_present = false;
  int audio_sample_rate = 0;
};

/// Half-open in frame indices is NOT used: both ends are inclusive.
struct Shot {
  int index = 0;
  int start_frame = 0;
  int end_frame = 0;
  double start_sec = 0.0;
  double end_sec = 0.0;
};

struct BoundaryMetrics {
  int boundary_index = 0;
  double ssim = 0.0;
  double hist_shift = 0.0;
  double flow_magnitude = 0.0;
};

/// Frame references chosen to represent the video: the temporal midpoint of
/// each shot plus the global first and last frames.
struct RepFrames {
  std::vector<int> per_shot;
  std::optional<int> first;
  std::optional<int> last;
};

struct AudioBlock {
  std::vector<double> energy_envelope;  // RMS over 50 ms hops
  int sample_rate = 0;
  bool separated = false;
};

struct TranscriptSegment {
  double start_sec = 0.0;
  double end_sec = 0.0;
  std::string text;
  int speaker_id = 0;
};

struct Transcript {
  std::vector<TranscriptSegment> segments;

  std::string full_text() const {
    std::string out;
    for (const auto& s : segments) {
      if (!out.empty() && !s.text.empty()) out += ' ';
      out += s.text;
    }
    return out;
  }
  int speaker_count() const {
    std::vector<int> seen;
    for (const auto& s : segments)
      if (std::find(seen.begin(), seen.end(), s.speaker_id) == seen.end())
        seen.push_back(s.speaker_id);
    return static_cast<int>(seen.size());
  }
};

/// Everything Phase 0 extracts. Well-formed under any subset of tool
/// failures: missing signals stay absent while the trace records why.
struct PreprocessingOutput {
  std::optional<MediaInfo> media;
  std::vector<Shot> shots;
  RepFrames rep_frames;
  std::vector<BoundaryMetrics> boundaries;
  AudioBlock audio;
  std::optional<Transcript> transcript;
  std::vector<ToolOutcome> trace;
  std::vector<Frame> frames;  // decoded (possibly downscaled) frames
};

// Trace file round-trip: JSON lines with (tool_name, status, latency_ms, note).
std::string trace_to_jsonl(const std::vector<ToolOutcome>& trace);
std::vector<ToolOutcome> trace_from_jsonl(const std::string& text);

}  // namespace vidiag::media
