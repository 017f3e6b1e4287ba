#include "json.hpp"

#include "vidiag/corpus/prompt.h"
#include "vidiag/net.h"

namespace vidiag::corpus {

using json = nlohmann::json;

std::string RemotePromptBackend::generate(const MetadataEntry& m, const UserProfile& u,
                                          uint64_t seed) {
  json payload = {
      {"meta_id", m.meta_id},
      {"duration_sec", m.duration_sec},
      {"video_type", to_string(m.video_type)},
      {"main_instruction", m.main_instruction},
      {"profile_id", u.profile_id},
      {"weights",
       {{"story", u.weights.story},
        {"visual", u.weights.visual},
        {"audio", u.weights.audio},
        {"sync", u.weights.sync}}},
      {"expertise_level", to_string(u.expertise_level)},
      {"expression_style", to_string(u.expression_style)},
      {"seed", seed},
  };

  auto reply = net::post_json(config_.remote_prompt_url, "/generate", payload.dump(),
                              config_.remote_timeout_ms, config_.remote_retries);
  if (!reply.ok)
    throw PromptBackendError("remote prompt backend unavailable: " + reply.error,
                             reply.error);
  try {
    json j = json::parse(reply.body);
    return j.at("text").get<std::string>();
  } catch (const std::exception& e) {
    throw PromptBackendError(std::string("remote prompt backend returned malformed reply: ") +
                                 e.what(),
                             reply.body);
  }
}

}  // namespace vidiag::corpus
