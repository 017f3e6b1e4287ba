#pragma once

#include <string>
#include <vector>

namespace vidiag {

/// Engine-wide tunables. Every threshold used anywhere in the engine lives
/// here with its documented default; a JSON config file (path given on the
/// command line or via the VIDIAG_CONFIG environment variable) overrides
/// individual keys.
struct EngineConfig {
  // Shot boundary detection.
  double shot_threshold = 0.30;    // histogram-shift cut threshold
  int shot_guard_window = 25;      // frames in the adaptive median window

  // Frame handling.
  int decode_max_height = 480;     // frames taller than this are downscaled

  // Prompt generation.
  int char_limit = 1200;           // prompt character-limit gate
  int prompt_max_retries = 3;      // regeneration attempts before rejection

  // Diagnosis synthesis.
  double low_confidence_tau = 0.4; // flag results with confidence below this
  double penalty_lambda = 0.5;     // hard-constraint violation multiplier
  int bottleneck_top_k = 10;       // bottleneck list truncation

  // Pipeline execution.
  int phase1_parallelism = 4;      // concurrent specialists (1..4)
  int judge_concurrency = 1;       // concurrent judge calls per specialist

  // Remote backends (judge and prompt generator).
  std::string remote_judge_url;    // e.g. http://127.0.0.1:8731/judge
  std::string remote_prompt_url;   // e.g. http://127.0.0.1:8731/prompt
  int remote_timeout_ms = 10000;
  int remote_retries = 2;

  // Subprocess tool names; looked up on PATH.
  std::string prober_bin = "ffprobe";
  std::string decoder_bin = "ffmpeg";

  // Optional data-file overrides. Empty means the built-in copies are used.
  std::string registry_path;
  std::string profiles_path;
  std::string constraints_path;
  std::string jargon_path;

  // Diagnostics: tools listed here are forced to fail. Drives the
  // degradation tests; empty in normal operation.
  std::vector<std::string> fail_tools;

  bool tool_forced_to_fail(const std::string& name) const;
};

/// Loads a config file, overlaying the defaults. Unknown keys are rejected.
EngineConfig load_config(const std::string& path);

/// Resolves the config: explicit path if non-empty, else $VIDIAG_CONFIG,
/// else defaults.
EngineConfig resolve_config(const std::string& explicit_path = "");

}  // namespace vidiag
