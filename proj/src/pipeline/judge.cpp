#include "vidiag/pipeline/judge.h"

#include <cstdio>

#include "vidiag/hash.h"
#include "vidiag/jsonio.h"
#include "vidiag/net.h"

namespace vidiag::pipeline {

namespace {

std::string hex16(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

constexpr const char* kJudgeInstructions =
    "Rate the generated video against the five anchors for this checkpoint. "
    "Use only the supplied evidence and metadata excerpt; respond with the "
    "anchor ordinal (1 worst .. 5 best) and a one-paragraph rationale.";

}  // namespace

nlohmann::ordered_json EvidenceBundle::to_json() const {
  nlohmann::ordered_json j;
  j["checkpoint_id"] = checkpoint_id;
  j["dimension"] = dimension;
  j["metadata_excerpt"] = metadata_excerpt;
  j["frame_refs"] = frame_refs;
  j["segment_refs"] = segment_refs;
  j["boundary_refs"] = boundary_refs;
  j["tool_trace_refs"] = tool_trace_refs;
  j["tool_availability"] = nlohmann::ordered_json::array();
  for (const auto& [tool, status] : tool_availability)
    j["tool_availability"].push_back({tool, status});
  j["signals"] = nlohmann::ordered_json::array();
  for (const auto& [name, value] : signals) {
    nlohmann::ordered_json e = nlohmann::ordered_json::array();
    e.push_back(name);
    e.push_back(value);
    j["signals"].push_back(std::move(e));
  }
  j["phase1_refs"] = phase1_refs;
  return j;
}

std::string EvidenceBundle::digest_hex() const {
  return hex16(fnv1a(canonical_dump(to_json())));
}

std::vector<std::string> EvidenceBundle::refs() const {
  std::vector<std::string> out;
  for (int i : tool_trace_refs) out.push_back("trace:" + std::to_string(i));
  for (int i : frame_refs) out.push_back("frame:" + std::to_string(i));
  for (int i : segment_refs) out.push_back("segment:" + std::to_string(i));
  for (int i : boundary_refs) out.push_back("boundary:" + std::to_string(i));
  for (const auto& id : phase1_refs) out.push_back("result:" + id);
  return out;
}

MockJudge::MockJudge(uint64_t seed) : seed_(seed) {}

JudgeVerdict MockJudge::judge(const rubric::Checkpoint& checkpoint,
                              const EvidenceBundle& evidence) {
  const std::string digest = evidence.digest_hex();
  uint64_t h = fnv1a(checkpoint.id);
  h = fnv1a("\x1f", h);
  h = fnv1a(digest, h);
  h = fnv1a("\x1f", h);
  h = fnv1a_u64(seed_, h);
  JudgeVerdict v;
  v.ordinal = static_cast<int>(1 + h % 5);
  v.rationale = "mock judgment: anchor " + std::to_string(v.ordinal) + " selected for " +
                checkpoint.id + " from evidence " + digest.substr(0, 8) + ".";
  v.self_report = 0.9;
  return v;
}

std::string MockJudge::id() const { return "mock"; }

RemoteJudge::RemoteJudge(const EngineConfig& config)
    : RemoteJudge(config.remote_judge_url, config.remote_timeout_ms,
                  config.remote_retries) {}

RemoteJudge::RemoteJudge(std::string url, int timeout_ms, int retries)
    : url_(std::move(url)), timeout_ms_(timeout_ms), retries_(retries) {}

JudgeVerdict RemoteJudge::judge(const rubric::Checkpoint& checkpoint,
                                const EvidenceBundle& evidence) {
  if (url_.empty()) throw JudgeError("remote judge url not configured");
  std::string base = url_, path = "/";
  const size_t scheme = url_.find("://");
  if (scheme != std::string::npos) {
    const size_t slash = url_.find('/', scheme + 3);
    if (slash != std::string::npos) {
      base = url_.substr(0, slash);
      path = url_.substr(slash);
    }
  }

  nlohmann::ordered_json body;
  body["checkpoint_id"] = checkpoint.id;
  body["anchors"] = checkpoint.anchors;
  body["evidence"] = evidence.to_json();
  body["instructions"] = kJudgeInstructions;

  const net::HttpReply reply =
      net::post_json(base, path, body.dump(), timeout_ms_, retries_);
  if (!reply.ok)
    throw JudgeError("remote judge unreachable: " +
                     (reply.error.empty() ? "status " + std::to_string(reply.status)
                                          : reply.error));
  try {
    const nlohmann::json j = nlohmann::json::parse(reply.body);
    JudgeVerdict v;
    v.ordinal = j.at("ordinal").get<int>();
    v.rationale = j.value("rationale", std::string());
    if (j.contains("self_report") && j["self_report"].is_number())
      v.self_report = j["self_report"].get<double>();
    if (v.ordinal < 1 || v.ordinal > 5)
      throw JudgeError("remote judge ordinal out of range: " +
                       std::to_string(v.ordinal));
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw JudgeError(std::string("remote judge malformed response: ") + e.what());
  }
}

std::string RemoteJudge::id() const { return "remote"; }

JudgeVerdict FixtureJudge::judge(const rubric::Checkpoint& checkpoint,
                                 const EvidenceBundle&) {
  if (fail_ids.count(checkpoint.id))
    throw JudgeError("scripted failure for " + checkpoint.id);
  JudgeVerdict v;
  auto it = ordinals.find(checkpoint.id);
  v.ordinal = it != ordinals.end() ? it->second : default_ordinal;
  v.rationale = "fixture judgment for " + checkpoint.id;
  v.self_report = self_report;
  return v;
}

}  // namespace vidiag::pipeline
