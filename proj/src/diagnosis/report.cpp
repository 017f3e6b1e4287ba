#include "vidiag/diagnosis/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "vidiag/jsonio.h"

namespace vidiag::diagnosis {

namespace {

double weight_for(const corpus::DimensionWeights& w, const std::string& dimension) {
  if (dimension == "script") return w.story;
  if (dimension == "visual") return w.visual;
  if (dimension == "audio") return w.audio;
  if (dimension == "crossmodal") return w.sync;
  throw ReportError("no user weight for dimension: " + dimension);
}

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

nlohmann::ordered_json opt_number(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

std::optional<double> opt_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

DimensionScore dimension_score(const std::vector<pipeline::CheckpointResult>& results_for_d) {
  DimensionScore out;
  out.n_checkpoints = static_cast<int>(results_for_d.size());
  if (results_for_d.empty()) {
    out.note = "not evaluated: no activated checkpoints";
    return out;
  }
  double num = 0.0, den = 0.0, csum = 0.0;
  for (const auto& r : results_for_d) {
    num += r.s * r.confidence;
    den += r.confidence;
    csum += r.confidence;
  }
  out.mean_confidence = csum / results_for_d.size();
  if (den <= 0.0) {
    out.note = "not evaluated: all confidences zero";
    return out;
  }
  out.value = num / den;
  return out;
}

double overall_score(const std::map<std::string, DimensionScore>& dimension_scores,
                     const corpus::UserProfile& u) {
  double num = 0.0, den = 0.0;
  bool any = false;
  for (const auto& d : rubric::canonical_dimensions()) {
    if (d == "stability") continue;
    auto it = dimension_scores.find(d);
    if (it == dimension_scores.end() || !it->second.evaluated()) continue;
    const double w = weight_for(u.weights, d);
    num += w * (*it->second.value);
    den += w;
    any = true;
  }
  if (!any || den <= 0.0) throw ReportError("overall undefined");
  return num / den;
}

void apply_hard_constraints(DiagnosisReport& report, const corpus::UserProfile& u,
                            const std::vector<rubric::HardConstraintRule>& rules,
                            double penalty_lambda) {
  std::optional<double> base;
  try {
    base = overall_score(report.dimension_scores, u);
  } catch (const ReportError&) {
    base = std::nullopt;
  }

  std::vector<ConstraintVerdict> verdicts;
  bool any_violated = false;
  for (const auto& id : u.hard_constraints) {
    const rubric::HardConstraintRule* rule = nullptr;
    for (const auto& r : rules)
      if (r.id == id) rule = &r;
    if (!rule) throw ReportError("hard constraint has no mapped checkpoint: " + id);

    ConstraintVerdict v;
    v.id = id;
    v.checkpoint_id = rule->checkpoint_id;
    const pipeline::CheckpointResult* res = nullptr;
    for (const auto& r : report.checkpoint_results)
      if (r.checkpoint_id == rule->checkpoint_id) res = &r;
    if (!res) {
      v.verdict = "unverifiable";
      v.note = "verifying checkpoint not activated";
    } else {
      v.s = res->s;
      v.confidence = res->confidence;
      if (res->confidence < 0.5) {
        v.verdict = "unverifiable";
        v.note = "confidence below 0.5";
      } else if (res->s < rule->violation_threshold) {
        v.verdict = "violated";
        v.note = "score below threshold " + two_decimals(rule->violation_threshold);
        any_violated = true;
      } else {
        v.verdict = "satisfied";
      }
    }
    verdicts.push_back(std::move(v));
  }

  report.overall.weights_used = u.weights;
  report.overall.hard_constraint_verdicts = std::move(verdicts);
  report.overall.penalty_applied = any_violated;
  if (base)
    report.overall.S_overall = any_violated ? *base * penalty_lambda : *base;
  else
    report.overall.S_overall = std::nullopt;
}

std::vector<Bottleneck> rank_bottlenecks(const std::vector<pipeline::CheckpointResult>& results,
                                         const rubric::Registry& registry, int top_k) {
  std::vector<Bottleneck> out;
  for (const auto& r : results) {
    const rubric::Checkpoint* cp = registry.find(r.checkpoint_id);
    if (!cp) throw ReportError("result for unknown checkpoint: " + r.checkpoint_id);
    out.push_back({r.checkpoint_id, r.s, r.confidence, cp->dimension});
  }
  std::sort(out.begin(), out.end(), [](const Bottleneck& a, const Bottleneck& b) {
    if (a.s != b.s) return a.s < b.s;
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.checkpoint_id < b.checkpoint_id;
  });
  if (top_k >= 0 && out.size() > static_cast<size_t>(top_k)) out.resize(top_k);
  return out;
}

std::vector<std::string> flag_low_confidence(const std::vector<pipeline::CheckpointResult>& results,
                                             double tau) {
  std::vector<std::string> out;
  for (const auto& r : results)
    if (r.confidence < tau) out.push_back(r.checkpoint_id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::optional<double>> radar_data(
    const std::map<std::string, DimensionScore>& dimension_scores) {
  std::vector<std::optional<double>> out;
  for (const auto& d : rubric::canonical_dimensions()) {
    auto it = dimension_scores.find(d);
    if (it != dimension_scores.end() && it->second.evaluated())
      out.push_back(it->second.value);
    else
      out.push_back(std::nullopt);
  }
  return out;
}

namespace {

std::string narrative_summary(const DiagnosisReport& r) {
  std::string text = "Evaluated " + std::to_string(r.checkpoint_results.size()) +
                     " checkpoints for " + r.meta_id + " under profile " + r.profile_id + ". ";
  if (r.overall.S_overall)
    text += "Overall score " + two_decimals(*r.overall.S_overall) + ".";
  else
    text += "Overall score not available.";
  if (!r.bottlenecks.empty()) {
    text += " Weakest checkpoints:";
    const size_t n = std::min<size_t>(3, r.bottlenecks.size());
    for (size_t i = 0; i < n; ++i) {
      text += (i ? ", " : " ") + r.bottlenecks[i].checkpoint_id + " (s=" +
              two_decimals(r.bottlenecks[i].s) + ")";
    }
    text += ".";
  }
  if (r.low_confidence_flags.empty())
    text += " No low-confidence results.";
  else
    text += " " + std::to_string(r.low_confidence_flags.size()) +
            " result(s) flagged for low confidence.";
  if (r.overall.penalty_applied) text += " Hard-constraint penalty applied.";
  return text;
}

}  // namespace

DiagnosisReport synthesize_report(const std::string& run_id,
                                  const corpus::MetadataEntry& m,
                                  const corpus::UserProfile& u,
                                  const std::vector<pipeline::CheckpointResult>& results,
                                  const rubric::Registry& registry,
                                  const std::vector<rubric::HardConstraintRule>& rules,
                                  const EngineConfig& config) {
  DiagnosisReport report;
  report.run_id = run_id;
  report.meta_id = m.meta_id;
  report.profile_id = u.profile_id;
  report.checkpoint_results = results;

  for (const auto& d : rubric::canonical_dimensions()) {
    std::vector<pipeline::CheckpointResult> in_d;
    for (const auto& r : results) {
      const rubric::Checkpoint* cp = registry.find(r.checkpoint_id);
      if (!cp) throw ReportError("result for unknown checkpoint: " + r.checkpoint_id);
      if (cp->dimension == d) in_d.push_back(r);
    }
    report.dimension_scores[d] = dimension_score(in_d);
  }

  apply_hard_constraints(report, u, rules, config.penalty_lambda);
  report.bottlenecks = rank_bottlenecks(results, registry, config.bottleneck_top_k);
  report.low_confidence_flags = flag_low_confidence(results, config.low_confidence_tau);
  report.radar = radar_data(report.dimension_scores);
  report.narrative_summary = narrative_summary(report);
  return report;
}

nlohmann::ordered_json checkpoint_result_to_json(const pipeline::CheckpointResult& r) {
  nlohmann::ordered_json j;
  j["checkpoint_id"] = r.checkpoint_id;
  j["ordinal"] = r.ordinal;
  j["s"] = r.s;
  j["confidence"] = r.confidence;
  j["evidence_refs"] = r.evidence_refs;
  j["rationale"] = r.rationale;
  j["judge_id"] = r.judge_id;
  return j;
}

pipeline::CheckpointResult checkpoint_result_from_json(const nlohmann::json& j) {
  pipeline::CheckpointResult r;
  r.checkpoint_id = j.at("checkpoint_id").get<std::string>();
  r.ordinal = j.at("ordinal").get<int>();
  r.s = j.at("s").get<double>();
  r.confidence = j.at("confidence").get<double>();
  r.evidence_refs = j.at("evidence_refs").get<std::vector<std::string>>();
  r.rationale = j.at("rationale").get<std::string>();
  r.judge_id = j.at("judge_id").get<std::string>();
  return r;
}

std::string serialize_report(const DiagnosisReport& report) {
  nlohmann::ordered_json j;
  j["schema_version"] = report.schema_version;
  j["run_id"] = report.run_id;
  j["meta_id"] = report.meta_id;
  j["profile_id"] = report.profile_id;

  j["checkpoint_results"] = nlohmann::ordered_json::array();
  for (const auto& r : report.checkpoint_results)
    j["checkpoint_results"].push_back(checkpoint_result_to_json(r));

  nlohmann::ordered_json dims;
  for (const auto& d : rubric::canonical_dimensions()) {
    auto it = report.dimension_scores.find(d);
    nlohmann::ordered_json e;
    if (it != report.dimension_scores.end() && it->second.evaluated()) {
      e["S_d"] = *it->second.value;
      e["n_checkpoints"] = it->second.n_checkpoints;
      e["mean_confidence"] = it->second.mean_confidence;
    } else {
      e["not_evaluated"] = true;
      e["note"] = it != report.dimension_scores.end() ? it->second.note
                                                      : "not evaluated: no activated checkpoints";
      e["n_checkpoints"] = it != report.dimension_scores.end() ? it->second.n_checkpoints : 0;
    }
    dims[d] = std::move(e);
  }
  j["dimension_scores"] = std::move(dims);

  nlohmann::ordered_json overall;
  overall["S_overall"] = opt_number(report.overall.S_overall);
  nlohmann::ordered_json weights;
  weights["script"] = report.overall.weights_used.story;
  weights["visual"] = report.overall.weights_used.visual;
  weights["audio"] = report.overall.weights_used.audio;
  weights["crossmodal"] = report.overall.weights_used.sync;
  overall["weights_used"] = std::move(weights);
  overall["hard_constraint_verdicts"] = nlohmann::ordered_json::array();
  for (const auto& v : report.overall.hard_constraint_verdicts) {
    nlohmann::ordered_json e;
    e["id"] = v.id;
    e["checkpoint_id"] = v.checkpoint_id;
    e["verdict"] = v.verdict;
    e["s"] = opt_number(v.s);
    e["confidence"] = opt_number(v.confidence);
    e["note"] = v.note;
    overall["hard_constraint_verdicts"].push_back(std::move(e));
  }
  overall["penalty_applied"] = report.overall.penalty_applied;
  j["overall"] = std::move(overall);

  j["bottlenecks"] = nlohmann::ordered_json::array();
  for (const auto& b : report.bottlenecks) {
    nlohmann::ordered_json e;
    e["checkpoint_id"] = b.checkpoint_id;
    e["s"] = b.s;
    e["confidence"] = b.confidence;
    e["dimension"] = b.dimension;
    j["bottlenecks"].push_back(std::move(e));
  }

  j["low_confidence_flags"] = report.low_confidence_flags;

  j["radar"] = nlohmann::ordered_json::array();
  for (const auto& v : report.radar) j["radar"].push_back(opt_number(v));

  j["narrative_summary"] = report.narrative_summary;
  return canonical_dump(j);
}

DiagnosisReport parse_report(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ReportError(std::string("report parse: ") + e.what());
  }
  try {
    DiagnosisReport r;
    r.schema_version = j.at("schema_version").get<std::string>();
    r.run_id = j.at("run_id").get<std::string>();
    r.meta_id = j.at("meta_id").get<std::string>();
    r.profile_id = j.at("profile_id").get<std::string>();
    for (const auto& e : j.at("checkpoint_results"))
      r.checkpoint_results.push_back(checkpoint_result_from_json(e));

    for (const auto& d : rubric::canonical_dimensions()) {
      const auto& e = j.at("dimension_scores").at(d);
      DimensionScore ds;
      if (e.contains("S_d")) {
        ds.value = e.at("S_d").get<double>();
        ds.n_checkpoints = e.at("n_checkpoints").get<int>();
        ds.mean_confidence = e.at("mean_confidence").get<double>();
      } else {
        ds.note = e.at("note").get<std::string>();
        ds.n_checkpoints = e.at("n_checkpoints").get<int>();
      }
      r.dimension_scores[d] = std::move(ds);
    }

    const auto& overall = j.at("overall");
    r.overall.S_overall = opt_from_json(overall.at("S_overall"));
    const auto& w = overall.at("weights_used");
    r.overall.weights_used.story = w.at("script").get<double>();
    r.overall.weights_used.visual = w.at("visual").get<double>();
    r.overall.weights_used.audio = w.at("audio").get<double>();
    r.overall.weights_used.sync = w.at("crossmodal").get<double>();
    for (const auto& e : overall.at("hard_constraint_verdicts")) {
      ConstraintVerdict v;
      v.id = e.at("id").get<std::string>();
      v.checkpoint_id = e.at("checkpoint_id").get<std::string>();
      v.verdict = e.at("verdict").get<std::string>();
      v.s = opt_from_json(e.at("s"));
      v.confidence = opt_from_json(e.at("confidence"));
      v.note = e.at("note").get<std::string>();
      r.overall.hard_constraint_verdicts.push_back(std::move(v));
    }
    r.overall.penalty_applied = overall.at("penalty_applied").get<bool>();

    for (const auto& e : j.at("bottlenecks")) {
      Bottleneck b;
      b.checkpoint_id = e.at("checkpoint_id").get<std::string>();
      b.s = e.at("s").get<double>();
      b.confidence = e.at("confidence").get<double>();
      b.dimension = e.at("dimension").get<std::string>();
      r.bottlenecks.push_back(std::move(b));
    }

    r.low_confidence_flags = j.at("low_confidence_flags").get<std::vector<std::string>>();
    for (const auto& e : j.at("radar")) r.radar.push_back(opt_from_json(e));
    r.narrative_summary = j.at("narrative_summary").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ReportError(std::string("report schema: ") + e.what());
  }
}

std::string render_markdown(const DiagnosisReport& r) {
  std::ostringstream md;
  md << "# Diagnosis " << r.run_id << "\n\n";
  md << "- metadata: `" << r.meta_id << "`\n";
  md << "- profile: `" << r.profile_id << "`\n";
  md << "- checkpoints evaluated: " << r.checkpoint_results.size() << "\n\n";

  md << "## Dimension scores\n\n";
  md << "| dimension | S_d | checkpoints | mean confidence |\n";
  md << "|---|---|---|---|\n";
  for (const auto& d : rubric::canonical_dimensions()) {
    auto it = r.dimension_scores.find(d);
    md << "| " << d << " | ";
    if (it != r.dimension_scores.end() && it->second.evaluated())
      md << format_fixed6(*it->second.value);
    else
      md << "not evaluated";
    md << " | " << (it != r.dimension_scores.end() ? it->second.n_checkpoints : 0) << " | ";
    if (it != r.dimension_scores.end() && it->second.evaluated())
      md << format_fixed6(it->second.mean_confidence);
    else
      md << "-";
    md << " |\n";
  }

  md << "\n## Overall\n\n";
  if (r.overall.S_overall)
    md << "- S_overall: **" << format_fixed6(*r.overall.S_overall) << "**\n";
  else
    md << "- S_overall: not available\n";
  md << "- weights: script " << format_fixed6(r.overall.weights_used.story) << ", visual "
     << format_fixed6(r.overall.weights_used.visual) << ", audio "
     << format_fixed6(r.overall.weights_used.audio) << ", crossmodal "
     << format_fixed6(r.overall.weights_used.sync) << "\n";
  md << "- penalty applied: " << (r.overall.penalty_applied ? "yes" : "no") << "\n";
  if (!r.overall.hard_constraint_verdicts.empty()) {
    md << "\n### Hard constraints\n\n";
    md << "| constraint | checkpoint | verdict | note |\n|---|---|---|---|\n";
    for (const auto& v : r.overall.hard_constraint_verdicts)
      md << "| " << v.id << " | " << v.checkpoint_id << " | " << v.verdict << " | "
         << (v.note.empty() ? "-" : v.note) << " |\n";
  }

  md << "\n## Radar\n\n";
  md << "| script | visual | audio | crossmodal | stability |\n";
  md << "|---|---|---|---|---|\n|";
  for (const auto& v : r.radar) md << " " << (v ? format_fixed6(*v) : "null") << " |";
  md << "\n";

  md << "\n## Bottlenecks\n\n";
  if (r.bottlenecks.empty()) {
    md << "none\n";
  } else {
    md << "| rank | checkpoint | s | confidence | dimension |\n|---|---|---|---|---|\n";
    int rank = 1;
    for (const auto& b : r.bottlenecks)
      md << "| " << rank++ << " | " << b.checkpoint_id << " | " << format_fixed6(b.s)
         << " | " << format_fixed6(b.confidence) << " | " << b.dimension << " |\n";
  }

  md << "\n## Low-confidence flags\n\n";
  if (r.low_confidence_flags.empty()) {
    md << "none\n";
  } else {
    for (const auto& id : r.low_confidence_flags) md << "- " << id << "\n";
  }

  md << "\n## Summary\n\n" << r.narrative_summary << "\n";
  return md.str();
}

}  // namespace vidiag::diagnosis
