#include "vidiag/analysis/ops.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "vidiag/corpus/profiles.h"
#include "vidiag/diagnosis/report.h"
#include "vidiag/rubric/registry.h"

namespace vidiag::analysis {

namespace {

std::vector<std::string> sorted_unique(const ResultTable& table,
                                       std::string ResultRow::*field) {
  std::set<std::string> seen;
  for (const auto& r : table.rows) seen.insert(r.*field);
  return {seen.begin(), seen.end()};
}

/// Confidence-weighted dimension scores of an arbitrary row group, keyed
/// by the rows' dimension labels.
std::map<std::string, diagnosis::DimensionScore> group_dimension_scores(
    const std::vector<ResultRow>& rows) {
  std::map<std::string, std::vector<pipeline::CheckpointResult>> by_dim;
  for (const auto& r : rows) {
    pipeline::CheckpointResult cr;
    cr.checkpoint_id = r.checkpoint_id;
    cr.s = r.s;
    cr.confidence = r.confidence;
    by_dim[r.dimension].push_back(std::move(cr));
  }
  std::map<std::string, diagnosis::DimensionScore> out;
  for (const auto& [dim, results] : by_dim) out[dim] = diagnosis::dimension_score(results);
  return out;
}

}  // namespace

std::vector<BottleneckStat> global_bottleneck_ranking(const ResultTable& table) {
  std::map<std::string, std::vector<double>> pooled;
  for (const auto& r : table.rows) pooled[r.sub_metric].push_back(r.s);

  std::vector<BottleneckStat> out;
  for (const auto& [metric, values] : pooled) {
    BottleneckStat stat;
    stat.sub_metric = metric;
    stat.n = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    stat.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - stat.mean) * (v - stat.mean);
    stat.std_dev = std::sqrt(sq / static_cast<double>(values.size()));
    out.push_back(std::move(stat));
  }
  std::sort(out.begin(), out.end(), [](const BottleneckStat& a, const BottleneckStat& b) {
    if (a.mean != b.mean) return a.mean < b.mean;
    return a.sub_metric < b.sub_metric;
  });
  return out;
}

CohortSignature cohort_signature(const ResultTable& table) {
  CohortSignature sig;
  sig.systems = sorted_unique(table, &ResultRow::system_id);
  sig.sub_metrics = sorted_unique(table, &ResultRow::sub_metric);
  if (sig.systems.size() < 2)
    throw AnalysisError("cohort signature needs at least 2 systems");

  std::map<std::pair<std::string, std::string>, std::vector<double>> cells;
  for (const auto& r : table.rows) cells[{r.sub_metric, r.system_id}].push_back(r.s);

  sig.cells.resize(sig.sub_metrics.size(),
                   std::vector<SignatureCell>(sig.systems.size()));
  for (size_t mi = 0; mi < sig.sub_metrics.size(); ++mi) {
    std::vector<std::optional<double>> means(sig.systems.size());
    double cohort_sum = 0.0;
    size_t cohort_n = 0;
    for (size_t wi = 0; wi < sig.systems.size(); ++wi) {
      auto it = cells.find({sig.sub_metrics[mi], sig.systems[wi]});
      if (it == cells.end()) continue;
      double sum = 0.0;
      for (double v : it->second) sum += v;
      means[wi] = sum / static_cast<double>(it->second.size());
      cohort_sum += *means[wi];
      ++cohort_n;
    }
    const double cohort_mean = cohort_n ? cohort_sum / static_cast<double>(cohort_n) : 0.0;
    std::optional<size_t> best;
    for (size_t wi = 0; wi < sig.systems.size(); ++wi) {
      if (!means[wi].has_value()) continue;
      sig.cells[mi][wi].delta = *means[wi] - cohort_mean;
      if (!best || *means[wi] > *means[*best]) best = wi;
    }
    if (best) sig.cells[mi][*best].best = true;
  }
  return sig;
}

double run_overall(const std::vector<ResultRow>& run_rows) {
  return diagnosis::overall_score(group_dimension_scores(run_rows),
                                  corpus::neutral_profile());
}

std::map<std::string, double> stratify_by_type(const ResultTable& table) {
  std::map<std::string, std::vector<ResultRow>> runs;
  for (const auto& r : table.rows)
    runs[r.system_id + '\x1f' + r.meta_id + '\x1f' + r.profile_id].push_back(r);

  std::map<std::string, std::pair<double, size_t>> acc;  // type -> (sum, n)
  for (const auto& [key, rows] : runs) {
    double overall = 0.0;
    try {
      overall = run_overall(rows);
    } catch (const diagnosis::ReportError&) {
      continue;  // no user-facing dimension evaluated: nothing to stratify
    }
    auto& slot = acc[rows.front().video_type];
    slot.first += overall;
    slot.second += 1;
  }
  std::map<std::string, double> out;
  for (const auto& [type, slot] : acc)
    out[type] = slot.first / static_cast<double>(slot.second);
  return out;
}

DimensionMatrix dimension_matrix(const ResultTable& table) {
  DimensionMatrix m;
  m.systems = sorted_unique(table, &ResultRow::system_id);

  std::map<std::string, std::vector<ResultRow>> by_system;
  for (const auto& r : table.rows) by_system[r.system_id].push_back(r);
  std::map<std::string, std::map<std::string, diagnosis::DimensionScore>> scores;
  for (const auto& s : m.systems) scores[s] = group_dimension_scores(by_system[s]);

  for (const auto& d : rubric::canonical_dimensions()) {
    bool present = false;
    for (const auto& s : m.systems) {
      auto it = scores[s].find(d);
      if (it != scores[s].end() && it->second.evaluated()) present = true;
    }
    if (present) m.dimensions.push_back(d);
  }
  m.values.resize(m.systems.size(),
                  std::vector<std::optional<double>>(m.dimensions.size()));
  for (size_t si = 0; si < m.systems.size(); ++si)
    for (size_t di = 0; di < m.dimensions.size(); ++di) {
      auto it = scores[m.systems[si]].find(m.dimensions[di]);
      if (it != scores[m.systems[si]].end() && it->second.evaluated())
        m.values[si][di] = *it->second.value;
    }
  return m;
}

NormalizedMatrix column_normalize(const DimensionMatrix& m) {
  if (m.systems.size() < 2)
    throw AnalysisError("column normalization needs at least 2 systems");
  NormalizedMatrix out;
  out.input = m;
  out.normalized.resize(m.systems.size(),
                        std::vector<std::optional<double>>(m.dimensions.size()));
  out.best_system.resize(m.dimensions.size());

  for (size_t di = 0; di < m.dimensions.size(); ++di) {
    std::optional<double> lo, hi;
    std::optional<size_t> best;
    for (size_t si = 0; si < m.systems.size(); ++si) {
      const auto& v = m.values[si][di];
      if (!v.has_value()) continue;
      if (!lo || *v < *lo) lo = *v;
      if (!hi || *v > *hi) hi = *v;
      if (!best || *v > *m.values[*best][di]) best = si;
    }
    if (!lo) continue;
    const bool constant = (*hi - *lo) < 1e-15;
    for (size_t si = 0; si < m.systems.size(); ++si) {
      const auto& v = m.values[si][di];
      if (!v.has_value()) continue;
      out.normalized[si][di] = constant ? 0.5 : (*v - *lo) / (*hi - *lo);
    }
    if (!constant && best) out.best_system[di] = m.systems[*best];
  }
  return out;
}

std::vector<SensitivityRow> profile_sensitivity(
    const ResultTable& table, const std::vector<corpus::UserProfile>& profiles) {
  if (profiles.size() < 2)
    throw AnalysisError("profile sensitivity needs at least 2 profiles");

  std::map<std::string, std::vector<ResultRow>> by_meta;
  for (const auto& r : table.rows) by_meta[r.meta_id].push_back(r);

  std::vector<SensitivityRow> out;
  for (const auto& [meta_id, rows] : by_meta) {
    const auto dims = group_dimension_scores(rows);
    SensitivityRow row;
    row.meta_id = meta_id;
    try {
      row.neutral = diagnosis::overall_score(dims, corpus::neutral_profile());
    } catch (const diagnosis::ReportError&) {
      continue;  // no user-facing dimension evaluated for this meta
    }
    bool first = true;
    for (const auto& p : profiles) {
      const double s = diagnosis::overall_score(dims, p);
      if (first || s < row.min) {
        row.min = s;
        row.argmin_profile = p.profile_id;
      }
      if (first || s > row.max) {
        row.max = s;
        row.argmax_profile = p.profile_id;
      }
      first = false;
    }
    row.width = row.max - row.min;
    out.push_back(std::move(row));
  }
  return out;
}

const std::vector<corpus::UserProfile>& sensitivity_profiles() {
  return corpus::builtin_profiles();
}

nlohmann::ordered_json bottlenecks_to_json(const std::vector<BottleneckStat>& stats) {
  nlohmann::ordered_json series = nlohmann::ordered_json::array();
  for (const auto& s : stats)
    series.push_back({{"sub_metric", s.sub_metric},
                      {"mean", s.mean},
                      {"std", s.std_dev},
                      {"n", s.n}});
  return {{"op", "global_bottleneck_ranking"}, {"series", series}};
}

nlohmann::ordered_json signature_to_json(const CohortSignature& sig) {
  nlohmann::ordered_json delta = nlohmann::ordered_json::array();
  nlohmann::ordered_json best = nlohmann::ordered_json::array();
  for (size_t mi = 0; mi < sig.sub_metrics.size(); ++mi) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    std::string best_system;
    for (size_t wi = 0; wi < sig.systems.size(); ++wi) {
      const auto& cell = sig.cells[mi][wi];
      if (cell.delta.has_value())
        row.push_back(*cell.delta);
      else
        row.push_back(nullptr);
      if (cell.best) best_system = sig.systems[wi];
    }
    delta.push_back(std::move(row));
    best.push_back(best_system);
  }
  return {{"op", "cohort_signature"},
          {"systems", sig.systems},
          {"sub_metrics", sig.sub_metrics},
          {"delta", delta},
          {"best", best}};
}

nlohmann::ordered_json stratification_to_json(const std::map<std::string, double>& means) {
  nlohmann::ordered_json obj = nlohmann::ordered_json::object();
  for (const auto& [type, mean] : means) obj[type] = mean;
  return {{"op", "stratify_by_type"}, {"means", obj}};
}

nlohmann::ordered_json heatmap_to_json(const NormalizedMatrix& m) {
  const auto matrix = [](const std::vector<std::vector<std::optional<double>>>& v) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : v) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (const auto& cell : r)
        if (cell.has_value())
          row.push_back(*cell);
        else
          row.push_back(nullptr);
      rows.push_back(std::move(row));
    }
    return rows;
  };
  return {{"op", "column_normalize"},
          {"systems", m.input.systems},
          {"dimensions", m.input.dimensions},
          {"values", matrix(m.input.values)},
          {"normalized", matrix(m.normalized)},
          {"best_system", m.best_system}};
}

nlohmann::ordered_json sensitivity_to_json(const std::vector<SensitivityRow>& rows) {
  nlohmann::ordered_json series = nlohmann::ordered_json::array();
  for (const auto& r : rows)
    series.push_back({{"meta_id", r.meta_id},
                      {"min", r.min},
                      {"max", r.max},
                      {"neutral", r.neutral},
                      {"width", r.width},
                      {"argmin_profile", r.argmin_profile},
                      {"argmax_profile", r.argmax_profile}});
  return {{"op", "profile_sensitivity"}, {"series", series}};
}

}  // namespace vidiag::analysis
