#pragma once

#include <optional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vidiag/config.h"
#include "vidiag/corpus/types.h"
#include "vidiag/pipeline/types.h"
#include "vidiag/rubric/registry.h"

namespace vidiag::diagnosis {

inline constexpr const char* kSchemaVersion = "1.0";

struct ReportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Confidence-weighted dimension aggregate. value is empty when the
/// dimension was not evaluated ("not evaluated" is a distinct state,
/// never encoded as 0.0); note says why.
struct DimensionScore {
  std::optional<double> value;
  int n_checkpoints = 0;
  double mean_confidence = 0.0;
  std::string note;

  bool evaluated() const { return value.has_value(); }
};

struct Bottleneck {
  std::string checkpoint_id;
  double s = 0.0;
  double confidence = 0.0;
  std::string dimension;
};

struct ConstraintVerdict {
  std::string id;
  std::string checkpoint_id;
  std::string verdict;  // "satisfied" | "violated" | "unverifiable"
  std::optional<double> s;
  std::optional<double> confidence;
  std::string note;
};

struct OverallBlock {
  std::optional<double> S_overall;
  corpus::DimensionWeights weights_used;
  std::vector<ConstraintVerdict> hard_constraint_verdicts;
  bool penalty_applied = false;
};

struct DiagnosisReport {
  std::string schema_version = kSchemaVersion;
  std::string run_id;
  std::string meta_id;
  std::string profile_id;
  std::vector<pipeline::CheckpointResult> checkpoint_results;
  std::map<std::string, DimensionScore> dimension_scores;  // all 5 dimensions
  OverallBlock overall;
  std::vector<Bottleneck> bottlenecks;
  std::vector<std::string> low_confidence_flags;
  std::vector<std::optional<double>> radar;  // fixed dimension order, 5 entries
  std::string narrative_summary;
};

/// S_d = Σ s·c / Σ c. Empty input or Σc = 0 yields a not-evaluated marker.
DimensionScore dimension_score(const std::vector<pipeline::CheckpointResult>& results_for_d);

/// Profile-weighted mean over the evaluated user-facing dimensions
/// (script, visual, audio, crossmodal); stability never participates.
/// Throws ReportError("overall undefined") when none is evaluated.
double overall_score(const std::map<std::string, DimensionScore>& dimension_scores,
                     const corpus::UserProfile& u);

/// Recomputes S_overall from the dimension scores, evaluates every hard
/// constraint named by the profile, and applies the multiplicative penalty
/// once if any verdict is "violated". Idempotent by construction.
void apply_hard_constraints(DiagnosisReport& report, const corpus::UserProfile& u,
                            const std::vector<rubric::HardConstraintRule>& rules,
                            double penalty_lambda);

/// Ascending by s, ties by descending confidence then checkpoint_id;
/// truncated to top_k.
std::vector<Bottleneck> rank_bottlenecks(const std::vector<pipeline::CheckpointResult>& results,
                                         const rubric::Registry& registry, int top_k);

/// Sorted checkpoint ids with confidence < tau.
std::vector<std::string> flag_low_confidence(const std::vector<pipeline::CheckpointResult>& results,
                                             double tau);

/// S_d per dimension in fixed order (script, visual, audio, crossmodal,
/// stability); unevaluated dimensions are empty (serialized as null).
std::vector<std::optional<double>> radar_data(
    const std::map<std::string, DimensionScore>& dimension_scores);

/// Full Phase-3 synthesis over judged results.
DiagnosisReport synthesize_report(const std::string& run_id,
                                  const corpus::MetadataEntry& m,
                                  const corpus::UserProfile& u,
                                  const std::vector<pipeline::CheckpointResult>& results,
                                  const rubric::Registry& registry,
                                  const std::vector<rubric::HardConstraintRule>& rules,
                                  const EngineConfig& config);

/// Canonical byte-stable serialization (fixed key order, %.6f floats).
/// parse → serialize round-trips byte-identically.
std::string serialize_report(const DiagnosisReport& report);
DiagnosisReport parse_report(const std::string& json_text);

nlohmann::ordered_json checkpoint_result_to_json(const pipeline::CheckpointResult& r);
pipeline::CheckpointResult checkpoint_result_from_json(const nlohmann::json& j);

std::string render_markdown(const DiagnosisReport& report);

}  // namespace vidiag::diagnosis
