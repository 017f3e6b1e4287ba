#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vidiag/config.h"
#include "vidiag/rubric/registry.h"

namespace vidiag::pipeline {

/// Thrown by judge backends on hard failure (transport error, malformed
/// response, out-of-range ordinal). The orchestrator converts it into a
/// confidence-0 result; it never aborts a run.
struct JudgeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// What a judge sees for one checkpoint: a metadata excerpt for the
/// checkpoint's modality, bounded references into the run's artifacts,
/// tool-availability context, and the current evidence signals. Latencies
/// are deliberately absent so the bundle digest is run-stable.
struct EvidenceBundle {
  std::string checkpoint_id;
  std::string dimension;
  std::string metadata_excerpt;
  std::vector<int> frame_refs;     // decoded-frame indices (≤ 6 rep frames)
  std::vector<int> segment_refs;   // transcript segment indices (≤ 6)
  std::vector<int> boundary_refs;  // shot-boundary indices (≤ 6)
  std::vector<int> tool_trace_refs;  // run-trace indices of required tools
  std::vector<std::pair<std::string, std::string>> tool_availability;
  std::vector<std::pair<std::string, double>> signals;
  std::vector<std::string> phase1_refs;  // cited Phase-1 checkpoint ids

  nlohmann::ordered_json to_json() const;
  std::string digest_hex() const;
  std::vector<std::string> refs() const;
};

struct JudgeVerdict {
  int ordinal = 3;
  std::string rationale;
  std::optional<double> self_report;  // ignored by calibration, by contract
};

class JudgeAdapter {
 public:
  virtual ~JudgeAdapter() = default;
  virtual JudgeVerdict judge(const rubric::Checkpoint& checkpoint,
                             const EvidenceBundle& evidence) = 0;
  virtual std::string id() const = 0;
};

/// Deterministic model-free judge: the ordinal is a stable 64-bit digest
/// of (checkpoint_id, evidence digest, seed) mapped uniformly onto 1..5.
class MockJudge final : public JudgeAdapter {
 public:
  explicit MockJudge(uint64_t seed = 0);
  JudgeVerdict judge(const rubric::Checkpoint& checkpoint,
                     const EvidenceBundle& evidence) override;
  std::string id() const override;
  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
};

/// Judge backed by an external service. Wire contract: POST body
/// {checkpoint_id, anchors, evidence, instructions}; response
/// {ordinal, rationale, self_report?}.
class RemoteJudge final : public JudgeAdapter {
 public:
  explicit RemoteJudge(const EngineConfig& config);
  RemoteJudge(std::string url, int timeout_ms, int retries);
  JudgeVerdict judge(const rubric::Checkpoint& checkpoint,
                     const EvidenceBundle& evidence) override;
  std::string id() const override;

 private:
  std::string url_;
  int timeout_ms_;
  int retries_;
};

/// Scripted judge for tests: per-checkpoint ordinals, optional forced
/// failures, and a constant self_report for the ignore-self-report
/// property.
class FixtureJudge final : public JudgeAdapter {
 public:
  int default_ordinal = 3;
  std::map<std::string, int> ordinals;
  std::set<std::string> fail_ids;
  std::optional<double> self_report;

  JudgeVerdict judge(const rubric::Checkpoint& checkpoint,
                     const EvidenceBundle& evidence) override;
  std::string id() const override { return "fixture"; }
};

}  // namespace vidiag::pipeline
