#include "vidiag/media/preprocess.h"

#include <atomic>
#include <cctype>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include <unistd.h>

#include "json.hpp"
#include "vidiag/media/audio.h"
#include "vidiag/media/io.h"
#include "vidiag/media/metrics.h"
#include "vidiag/media/shots.h"
#include "vidiag/media/subprocess.h"

namespace vidiag::media {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool is_y4m(const fs::path& p) {
  std::string ext = p.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".y4m";
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  out += "'";
  return out;
}

std::string note_snippet(const std::string& text) {
  std::string line = text.substr(0, text.find('\n'));
  if (line.size() > 160) line = line.substr(0, 157) + "...";
  return line;
}

fs::path unique_temp_path(const std::string& stem, const std::string& ext) {
  static std::atomic<uint64_t> counter{0};
  std::ostringstream name;
  name << stem << "-" << ::getpid() << "-" << counter.fetch_add(1) << ext;
  return fs::temp_directory_path() / name.str();
}

struct Y4mHead {
  int width = 0;
  int height = 0;
  double fps = 0.0;
  long frame_count = 0;
};

// Header + frame count without materializing the planes.
std::optional<Y4mHead> scan_y4m(const fs::path& path, std::string& error) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    error = "cannot open file";
    return std::nullopt;
  }
  std::string header;
  if (!std::getline(in, header) || header.rfind("YUV4MPEG2", 0) != 0) {
    error = "not a YUV4MPEG2 stream";
    return std::nullopt;
  }
  Y4mHead head;
  std::string chroma = "420";
  std::istringstream toks(header);
  std::string tok;
  toks >> tok;  // magic
  while (toks >> tok) {
    if (tok.size() < 2) continue;
    const std::string rest = tok.substr(1);
    switch (tok[0]) {
      case 'W': head.width = std::stoi(rest); break;
      case 'H': head.height = std::stoi(rest); break;
      case 'F': {
        auto slash = rest.find(':');
        if (slash == std::string::npos) {
          error = "bad frame-rate token";
          return std::nullopt;
        }
        double num = std::stod(rest.substr(0, slash));
        double den = std::stod(rest.substr(slash + 1));
        if (den > 0) head.fps = num / den;
        break;
      }
      case 'C': chroma = rest; break;
      default: break;
    }
  }
  if (head.width <= 0 || head.height <= 0) {
    error = "missing frame dimensions";
    return std::nullopt;
  }
  if (chroma.rfind("444", 0) != 0) {
    error = "unsupported chroma subsampling C" + chroma;
    return std::nullopt;
  }
  const std::streamoff plane_bytes =
      3 * static_cast<std::streamoff>(head.width) * head.height;
  std::string marker;
  while (std::getline(in, marker)) {
    if (marker.rfind("FRAME", 0) != 0) {
      error = "corrupt frame marker";
      return std::nullopt;
    }
    in.seekg(plane_bytes, std::ios::cur);
    if (!in) {
      error = "truncated frame data";
      return std::nullopt;
    }
    ++head.frame_count;
    in.peek();  // set eofbit cleanly at end of stream
    if (in.eof()) break;
  }
  return head;
}

nlohmann::json media_payload(const MediaInfo& info) {
  return {{"duration_sec", info.duration_sec}, {"width", info.width},
          {"height", info.height},             {"fps", info.fps},
          {"audio_present", info.audio_present},
          {"audio_sample_rate", info.audio_sample_rate}};
}

std::pair<std::optional<MediaInfo>, ToolOutcome> probe_external(
    const std::string& path, const EngineConfig& config, Clock::time_point t0) {
  const std::string cmd = config.prober_bin +
                          " -v error -print_format json -show_format -show_streams " +
                          shell_quote(path);
  CommandResult res = run_command(cmd);
  if (res.binary_missing || res.launch_failed) {
    return {std::nullopt,
            ToolOutcome::failed("probe", ms_since(t0),
                                "media prober unavailable (" + config.prober_bin + ")")};
  }
  if (res.exit_code != 0) {
    return {std::nullopt, ToolOutcome::failed("probe", ms_since(t0),
                                              "probe error: " + note_snippet(res.output))};
  }
  try {
    const nlohmann::json j = nlohmann::json::parse(res.output);
    MediaInfo info;
    if (j.contains("format") && j["format"].contains("duration"))
      info.duration_sec = std::stod(j["format"]["duration"].get<std::string>());
    for (const auto& stream : j.value("streams", nlohmann::json::array())) {
      const std::string type = stream.value("codec_type", "");
      if (type == "video" && info.width == 0) {
        info.width = stream.value("width", 0);
        info.height = stream.value("height", 0);
        const std::string rate = stream.value("avg_frame_rate", "0/1");
        auto slash = rate.find('/');
        if (slash != std::string::npos) {
          double num = std::stod(rate.substr(0, slash));
          double den = std::stod(rate.substr(slash + 1));
          if (den > 0) info.fps = num / den;
        }
      } else if (type == "audio" && !info.audio_present) {
        info.audio_present = true;
        info.audio_sample_rate = std::stoi(stream.value("sample_rate", "0"));
      }
    }
    return {info, ToolOutcome::ok("probe", ms_since(t0), media_payload(info))};
  } catch (const std::exception& e) {
    return {std::nullopt,
            ToolOutcome::failed("probe", ms_since(t0),
                                std::string("probe output unparseable: ") + e.what())};
  }
}

std::pair<std::optional<DecodedVideo>, ToolOutcome> decode_external(
    const std::string& path, const EngineConfig& config, Clock::time_point t0) {
  const fs::path tmp = unique_temp_path("vidiag-dec", ".y4m");
  // min(max_height, ih): never upscale; \, keeps the comma inside the filter arg.
  const std::string vf =
      "scale=-2:min(" + std::to_string(config.decode_max_height) + "\\,ih)";
  const std::string cmd = config.decoder_bin + " -v error -y -i " + shell_quote(path) +
                          " -vf " + shell_quote(vf) +
                          " -pix_fmt yuv444p -f yuv4mpegpipe " + shell_quote(tmp.string());
  CommandResult res = run_command(cmd);
  if (res.binary_missing || res.launch_failed) {
    return {std::nullopt,
            ToolOutcome::failed("decode", ms_since(t0),
                                "media decoder unavailable (" + config.decoder_bin + ")")};
  }
  if (res.exit_code != 0) {
    std::error_code ec;
    fs::remove(tmp, ec);
    return {std::nullopt, ToolOutcome::failed("decode", ms_since(t0),
                                              "decode error: " + note_snippet(res.output))};
  }
  try {
    VideoFile vf_file = read_y4m(tmp);
    std::error_code ec;
    fs::remove(tmp, ec);
    DecodedVideo dec{std::move(vf_file.frames), vf_file.fps};
    nlohmann::json payload = {{"frames", dec.frames.size()}, {"fps", dec.fps}};
    return {std::move(dec), ToolOutcome::ok("decode", ms_since(t0), std::move(payload))};
  } catch (const std::exception& e) {
    std::error_code ec;
    fs::remove(tmp, ec);
    return {std::nullopt, ToolOutcome::failed("decode", ms_since(t0),
                                              std::string("decode error: ") + e.what())};
  }
}

}  // namespace

std::pair<std::optional<MediaInfo>, ToolOutcome> probe_video(const std::string& path,
                                                             const EngineConfig& config) {
  const auto t0 = Clock::now();
  const fs::path p(path);
  if (!is_y4m(p)) return probe_external(path, config, t0);

  std::string error;
  auto head = scan_y4m(p, error);
  if (!head)
    return {std::nullopt,
            ToolOutcome::failed("probe", ms_since(t0), "probe error: " + error)};

  MediaInfo info;
  info.width = head->width;
  info.height = head->height;
  info.fps = head->fps;
  info.duration_sec = head->fps > 0 ? head->frame_count / head->fps : 0.0;

  std::string note;
  const fs::path sidecar = audio_sidecar_for(p);
  std::error_code ec;
  if (fs::exists(sidecar, ec)) {
    try {
      AudioFile af = read_wav(sidecar);
      info.audio_present = !af.samples.empty();
      info.audio_sample_rate = af.sample_rate;
    } catch (const std::exception& e) {
      note = std::string("audio sidecar unreadable: ") + e.what();
    }
  }
  ToolOutcome oc = ToolOutcome::ok("probe", ms_since(t0), media_payload(info));
  oc.note = note;
  return {info, oc};
}

std::pair<std::optional<DecodedVideo>, ToolOutcome> decode_video(
    const std::string& path, const EngineConfig& config) {
  const auto t0 = Clock::now();
  const fs::path p(path);
  if (!is_y4m(p)) return decode_external(path, config, t0);

  try {
    VideoFile vf = read_y4m(p);
    for (Frame& f : vf.frames)
      if (f.height > config.decode_max_height)
        f = downscale_to_height(f, config.decode_max_height);
    DecodedVideo dec{std::move(vf.frames), vf.fps};
    nlohmann::json payload = {{"frames", dec.frames.size()}, {"fps", dec.fps}};
    return {std::move(dec), ToolOutcome::ok("decode", ms_since(t0), std::move(payload))};
  } catch (const std::exception& e) {
    return {std::nullopt, ToolOutcome::failed("decode", ms_since(t0),
                                              std::string("decode error: ") + e.what())};
  }
}

std::pair<AudioBlock, ToolOutcome> extract_audio_features(const std::string& path,
                                                          const EngineConfig& config) {
  const auto t0 = Clock::now();
  const fs::path p(path);
  AudioBlock block;

  AudioFile audio;
  if (is_y4m(p)) {
    const fs::path sidecar = audio_sidecar_for(p);
    std::error_code ec;
    if (!fs::exists(sidecar, ec)) {
      return {block, ToolOutcome::degraded("audio_features", ms_since(t0),
                                           {{"hops", 0}, {"sample_rate", 0}},
                                           "no audio stream")};
    }
    try {
      audio = read_wav(sidecar);
    } catch (const std::exception& e) {
      return {block, ToolOutcome::failed("audio_features", ms_since(t0),
                                         std::string("audio error: ") + e.what())};
    }
  } else {
    const fs::path tmp = unique_temp_path("vidiag-aud", ".wav");
    const std::string cmd = config.decoder_bin + " -v error -y -i " + shell_quote(path) +
                            " -vn -ac 1 -f wav " + shell_quote(tmp.string());
    CommandResult res = run_command(cmd);
    if (res.binary_missing || res.launch_failed) {
      return {block,
              ToolOutcome::failed("audio_features", ms_since(t0),
                                  "audio decoder unavailable (" + config.decoder_bin + ")")};
    }
    if (res.exit_code != 0) {
      std::error_code ec;
      fs::remove(tmp, ec);
      if (res.output.find("does not contain any stream") != std::string::npos) {
        return {block, ToolOutcome::degraded("audio_features", ms_since(t0),
                                             {{"hops", 0}, {"sample_rate", 0}},
                                             "no audio stream")};
      }
      return {block, ToolOutcome::failed("audio_features", ms_since(t0),
                                         "audio error: " + note_snippet(res.output))};
    }
    try {
      audio = read_wav(tmp);
      std::error_code ec;
      fs::remove(tmp, ec);
    } catch (const std::exception& e) {
      std::error_code ec;
      fs::remove(tmp, ec);
      return {block, ToolOutcome::failed("audio_features", ms_since(t0),
                                         std::string("audio error: ") + e.what())};
    }
  }

  if (audio.samples.empty()) {
    return {block, ToolOutcome::degraded("audio_features", ms_since(t0),
                                         {{"hops", 0}, {"sample_rate", audio.sample_rate}},
                                         "no audio stream")};
  }
  block.energy_envelope = energy_envelope(audio.samples, audio.sample_rate);
  block.sample_rate = audio.sample_rate;
  nlohmann::json payload = {{"hops", block.energy_envelope.size()},
                            {"sample_rate", block.sample_rate}};
  return {block, ToolOutcome::ok("audio_features", ms_since(t0), std::move(payload))};
}

PreprocessingOutput run_preprocessing(const std::string& path, const AdapterSet& adapters,
                                      const EngineConfig& config,
                                      const std::string& run_dir) {
  PreprocessingOutput out;
  const auto forced = [&config](const char* name) {
    return config.tool_forced_to_fail(name);
  };
  const auto push_forced = [&out](const char* name) {
    out.trace.push_back(ToolOutcome::failed(name, 0.0, "forced failure (config)"));
  };

  // probe
  if (forced("probe")) {
    push_forced("probe");
  } else {
    auto [info, oc] = probe_video(path, config);
    out.media = info;
    out.trace.push_back(std::move(oc));
  }

  // decode
  double fps = out.media ? out.media->fps : 0.0;
  if (forced("decode")) {
    push_forced("decode");
  } else {
    auto [dec, oc] = decode_video(path, config);
    if (dec) {
      out.frames = std::move(dec->frames);
      if (fps <= 0 && dec->fps > 0) fps = dec->fps;
    }
    out.trace.push_back(std::move(oc));
  }

  // shots
  if (forced("shots")) {
    push_forced("shots");
  } else if (out.frames.empty()) {
    out.trace.push_back(ToolOutcome::failed("shots", 0.0, "no decoded frames"));
  } else {
    const auto t0 = Clock::now();
    try {
      out.shots = detect_shots(out.frames, config.shot_threshold, fps,
                               config.shot_guard_window);
      out.trace.push_back(ToolOutcome::ok(
          "shots", ms_since(t0), {{"count", out.shots.size()}}));
    } catch (const std::exception& e) {
      out.shots.clear();
      out.trace.push_back(ToolOutcome::failed("shots", ms_since(t0),
                                              std::string("shot detection error: ") + e.what()));
    }
  }

  // rep_frames
  if (forced("rep_frames")) {
    push_forced("rep_frames");
  } else if (out.shots.empty()) {
    out.trace.push_back(ToolOutcome::failed("rep_frames", 0.0, "no shots available"));
  } else {
    const auto t0 = Clock::now();
    out.rep_frames =
        extract_representative_frames(out.shots, static_cast<int>(out.frames.size()));
    std::string note;
    if (!run_dir.empty()) {
      const fs::path frame_dir = fs::path(run_dir) / "frames";
      try {
        fs::create_directories(frame_dir);
        int cached = 0;
        for (size_t i = 0; i < out.shots.size(); ++i) {
          const int idx = out.rep_frames.per_shot[i];
          if (idx < 0 || idx >= static_cast<int>(out.frames.size())) continue;
          write_png(frame_dir / ("shot_" + std::to_string(out.shots[i].index) + ".png"),
                    out.frames[idx]);
          ++cached;
        }
        note = "cached " + std::to_string(cached) + " frames";
      } catch (const std::exception& e) {
        note = std::string("frame cache write failed: ") + e.what();
      }
    }
    nlohmann::json refs = nlohmann::json::array();
    for (int idx : out.rep_frames.per_shot) refs.push_back(idx);
    nlohmann::json payload = {{"per_shot", std::move(refs)},
                              {"first", out.rep_frames.first.value_or(-1)},
                              {"last", out.rep_frames.last.value_or(-1)}};
    out.trace.push_back(
        ToolOutcome::ok("rep_frames", ms_since(t0), std::move(payload), std::move(note)));
  }

  // boundary metrics, one per shot boundary
  const size_t n_boundaries = out.shots.empty() ? 0 : out.shots.size() - 1;
  for (size_t i = 0; i < n_boundaries; ++i) {
    BoundaryMetrics bm;
    bm.boundary_index = static_cast<int>(i);
    if (forced("boundary_metrics")) {
      out.boundaries.push_back(bm);
      push_forced("boundary_metrics");
      continue;
    }
    const auto t0 = Clock::now();
    try {
      const Frame& a = out.frames.at(out.shots[i].end_frame);
      const Frame& b = out.frames.at(out.shots[i + 1].start_frame);
      bm.ssim = compute_ssim(a, b);
      bm.hist_shift = compute_hist_shift(a, b);
      bm.flow_magnitude = compute_flow_magnitude(a, b);
      out.boundaries.push_back(bm);
      out.trace.push_back(ToolOutcome::ok("boundary_metrics", ms_since(t0),
                                          {{"boundary_index", bm.boundary_index},
                                           {"ssim", bm.ssim},
                                           {"hist_shift", bm.hist_shift},
                                           {"flow_magnitude", bm.flow_magnitude}}));
    } catch (const std::exception& e) {
      out.boundaries.push_back(bm);  // zero placeholder keeps the count invariant
      out.trace.push_back(ToolOutcome::failed(
          "boundary_metrics", ms_since(t0),
          "boundary " + std::to_string(i) + ": " + e.what()));
    }
  }

  // audio features
  if (forced("audio_features")) {
    push_forced("audio_features");
  } else {
    auto [block, oc] = extract_audio_features(path, config);
    out.audio = std::move(block);
    out.trace.push_back(std::move(oc));
  }

  // ASR adapter
  if (forced("asr")) {
    push_forced("asr");
  } else if (out.audio.energy_envelope.empty()) {
    out.trace.push_back(ToolOutcome::failed("asr", 0.0, "no audio stream"));
  } else if (!adapters.asr) {
    out.trace.push_back(ToolOutcome::failed("asr", 0.0, "adapter not configured"));
  } else {
    const auto t0 = Clock::now();
    AdapterResult<Transcript> res = adapters.asr->transcribe(out.audio);
    res.outcome.tool_name = "asr";
    res.outcome.latency_ms = ms_since(t0);
    if (res.value) out.transcript = std::move(*res.value);
    out.trace.push_back(std::move(res.outcome));
  }

  // source separation adapter
  if (forced("source_separation")) {
    push_forced("source_separation");
  } else if (out.audio.energy_envelope.empty()) {
    out.trace.push_back(ToolOutcome::failed("source_separation", 0.0, "no audio stream"));
  } else if (!adapters.separation) {
    out.trace.push_back(
        ToolOutcome::failed("source_separation", 0.0, "adapter not configured"));
  } else {
    const auto t0 = Clock::now();
    AdapterResult<double> res = adapters.separation->separate(out.audio);
    res.outcome.tool_name = "source_separation";
    res.outcome.latency_ms = ms_since(t0);
    out.audio.separated = res.outcome.status == ToolStatus::success;
    out.trace.push_back(std::move(res.outcome));
  }

  if (!run_dir.empty()) {
    std::error_code ec;
    fs::create_directories(run_dir, ec);
    std::ofstream trace_file(fs::path(run_dir) / "trace.jsonl", std::ios::binary);
    if (trace_file) trace_file << trace_to_jsonl(out.trace);
  }
  return out;
}

}  // namespace vidiag::media
