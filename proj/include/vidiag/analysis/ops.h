#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vidiag/analysis/table.h"
#include "vidiag/corpus/types.h"

namespace vidiag::analysis {

/// Pooled per-sub-metric statistics, ascending by mean (ties by name).
/// std is the population standard deviation.
struct BottleneckStat {
  std::string sub_metric;
  double mean = 0.0;
  double std_dev = 0.0;
  std::size_t n = 0;
};
std::vector<BottleneckStat> global_bottleneck_ranking(const ResultTable& table);

/// Per-(sub_metric, system) deviation from the cohort mean of per-system
/// means. Missing cells are excluded from their cohort mean.
struct SignatureCell {
  std::optional<double> delta;
  bool best = false;
};
struct CohortSignature {
  std::vector<std::string> systems;      // sorted
  std::vector<std::string> sub_metrics;  // sorted
  std::vector<std::vector<SignatureCell>> cells;  // [sub_metric][system]
};
CohortSignature cohort_signature(const ResultTable& table);

/// Neutral-profile overall score of one run's rows (one video under one
/// profile): confidence-weighted dimension means, equal-weight combination
/// over the evaluated user-facing dimensions.
double run_overall(const std::vector<ResultRow>& run_rows);

/// video_type → mean of per-run overall scores.
std::map<std::string, double> stratify_by_type(const ResultTable& table);

/// systems × dimensions matrix of pooled confidence-weighted dimension
/// scores; cells without any confident row stay empty.
struct DimensionMatrix {
  std::vector<std::string> systems;     // sorted
  std::vector<std::string> dimensions;  // canonical order, present ones
  std::vector<std::vector<std::optional<double>>> values;  // [system][dim]
};
DimensionMatrix dimension_matrix(const ResultTable& table);

/// Per column: (x - min) / (max - min); a constant column maps to all 0.5.
/// best_system[d] names the per-column maximum (empty when the column is
/// constant or absent).
struct NormalizedMatrix {
  DimensionMatrix input;
  std::vector<std::vector<std::optional<double>>> normalized;  // [system][dim]
  std::vector<std::string> best_system;                        // per dimension
};
NormalizedMatrix column_normalize(const DimensionMatrix& m);

/// Per-meta spread of the profile-weighted overall score across the given
/// profiles, plus the equal-weight neutral score.
struct SensitivityRow {
  std::string meta_id;
  double min = 0.0;
  double max = 0.0;
  double neutral = 0.0;
  double width = 0.0;
  std::string argmin_profile;
  std::string argmax_profile;
};
std::vector<SensitivityRow> profile_sensitivity(const ResultTable& table,
                                                const std::vector<corpus::UserProfile>& profiles);

/// The seven shipped profiles. Sensitivity analyses run these plus the
/// neutral equal-weight baseline.
const std::vector<corpus::UserProfile>& sensitivity_profiles();

// ---- plot-ready JSON series (data only, rendering is external)

nlohmann::ordered_json bottlenecks_to_json(const std::vector<BottleneckStat>& stats);
nlohmann::ordered_json signature_to_json(const CohortSignature& sig);
nlohmann::ordered_json stratification_to_json(const std::map<std::string, double>& means);
nlohmann::ordered_json heatmap_to_json(const NormalizedMatrix& m);
nlohmann::ordered_json sensitivity_to_json(const std::vector<SensitivityRow>& rows);

}  // namespace vidiag::analysis
