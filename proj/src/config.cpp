#include "vidiag/config.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace vidiag {

bool EngineConfig::tool_forced_to_fail(const std::string& name) const {
  return std::find(fail_tools.begin(), fail_tools.end(), name) != fail_tools.end();
}

EngineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("config: cannot open " + path);
  }
  nlohmann::json j = nlohmann::json::parse(in);
  EngineConfig cfg;
  for (auto& [key, value] : j.items()) {
    if (key == "shot_threshold") cfg.shot_threshold = value.get<double>();
    else if (key == "shot_guard_window") cfg.shot_guard_window = value.get<int>();
    else if (key == "decode_max_height") cfg.decode_max_height = value.get<int>();
    else if (key == "char_limit") cfg.char_limit = value.get<int>();
    else if (key == "prompt_max_retries") cfg.prompt_max_retries = value.get<int>();
    else if (key == "low_confidence_tau") cfg.low_confidence_tau = value.get<double>();
    else if (key == "penalty_lambda") cfg.penalty_lambda = value.get<double>();
    else if (key == "bottleneck_top_k") cfg.bottleneck_top_k = value.get<int>();
    else if (key == "phase1_parallelism") cfg.phase1_parallelism = value.get<int>();
    else if (key == "judge_concurrency") cfg.judge_concurrency = value.get<int>();
    else if (key == "remote_judge_url") cfg.remote_judge_url = value.get<std::string>();
    else if (key == "remote_prompt_url") cfg.remote_prompt_url = value.get<std::string>();
    else if (key == "remote_timeout_ms") cfg.remote_timeout_ms = value.get<int>();
    else if (key == "remote_retries") cfg.remote_retries = value.get<int>();
    else if (key == "prober_bin") cfg.prober_bin = value.get<std::string>();
    else if (key == "decoder_bin") cfg.decoder_bin = value.get<std::string>();
    else if (key == "registry_path") cfg.registry_path = value.get<std::string>();
    else if (key == "profiles_path") cfg.profiles_path = value.get<std::string>();
    else if (key == "constraints_path") cfg.constraints_path = value.get<std::string>();
    else if (key == "jargon_path") cfg.jargon_path = value.get<std::string>();
    else if (key == "fail_tools") cfg.fail_tools = value.get<std::vector<std::string>>();
    else throw std::runtime_error("config: unknown key '" + key + "'");
  }
  return cfg;
}

EngineConfig resolve_config(const std::string& explicit_path) {
  if (!explicit_path.empty()) {
    return load_config(explicit_path);
  }
  if (const char* env = std::getenv("VIDIAG_CONFIG"); env && *env) {
    return load_config(env);
  }
  return EngineConfig{};
}

}  // namespace vidiag
