#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vidiag/config.h"
#include "vidiag/media/adapters.h"
#include "vidiag/media/types.h"

namespace vidiag::media {

/// Probes container metadata. Native for .y4m (with an optional .wav audio
/// sidecar next to it); other containers go through the configured external
/// prober. Missing binaries or unreadable files yield a failure outcome.
std::pair<std::optional<MediaInfo>, ToolOutcome> probe_video(
    const std::string& path, const EngineConfig& config);

struct DecodedVideo {
  std::vector<Frame> frames;
  double fps = 0.0;
};

/// Decodes frames, downscaling to config.decode_max_height when taller.
std::pair<std::optional<DecodedVideo>, ToolOutcome> decode_video(
    const std::string& path, const EngineConfig& config);

/// Decodes the audio track (sidecar .wav for .y4m inputs, external decoder
/// otherwise) and reduces it to an RMS energy envelope over 50 ms hops.
/// A file without audio degrades to a fallback outcome with an empty
/// envelope; only broken tooling produces a failure.
std::pair<AudioBlock, ToolOutcome> extract_audio_features(
    const std::string& path, const EngineConfig& config);

/// Phase-0 orchestrator. Runs every tool in a fixed order (probe, decode,
/// shots, rep_frames, boundary metrics per boundary, audio features, ASR,
/// source separation), records one trace entry per attempt, and never
/// aborts on individual tool failure. Tools named in config.fail_tools are
/// forced to fail without running. When run_dir is non-empty the per-shot
/// representative frames are cached as <run_dir>/frames/shot_<k>.png.
PreprocessingOutput run_preprocessing(const std::string& path,
                                      const AdapterSet& adapters,
                                      const EngineConfig& config,
                                      const std::string& run_dir = "");

}  // namespace vidiag::media
