#include "vidiag/pipeline/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <mutex>
#include <numeric>

#include "vidiag/hash.h"
#include "vidiag/jsonio.h"
#include "vidiag/media/preprocess.h"

namespace vidiag::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr const char* kForcedFailureNote = "forced failure (config)";

struct JudgeGate {
  std::mutex* mutex = nullptr;  // non-null → serialize every judge call
};

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string hex16(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bool needs_tool(const rubric::Checkpoint& cp, const std::string& tool) {
  return std::find(cp.required_tools.begin(), cp.required_tools.end(), tool) !=
         cp.required_tools.end();
}

double status_value(media::ToolStatus s) {
  switch (s) {
    case media::ToolStatus::success: return 1.0;
    case media::ToolStatus::fallback: return 0.5;
    case media::ToolStatus::failure: return 0.0;
  }
  return 0.0;
}

std::string clip(std::string s, size_t max_len = 800) {
  if (s.size() > max_len) s.resize(max_len);
  return s;
}

std::string metadata_excerpt_for(const std::string& dimension,
                                 const corpus::MetadataEntry& m) {
  std::string out;
  const auto& arc = m.text.story_arc;
  if (dimension == "script") {
    out = m.main_instruction;
    if (!arc.empty())
      out += " | arc: " + arc.act1_setup + " / " + arc.act2_conflict + " / " +
             arc.act3_resolution;
    if (!m.text.tone_requirements.empty()) out += " | tone: " + m.text.tone_requirements;
  } else if (dimension == "visual") {
    out = m.main_instruction;
    std::string shots;
    for (size_t i = 0; i < m.visual.shots.size() && i < 3; ++i)
      shots += (i ? "; " : "") + m.visual.shots[i].description;
    if (!shots.empty()) out += " | shots: " + shots;
    for (const auto& r : m.visual.consistency_requirements) out += " | " + r;
  } else if (dimension == "audio") {
    out = "dialogue: " + std::string(m.audio.dialogue ? "yes" : "no");
    out += " | lip_sync: " + std::string(m.audio.lip_sync ? "yes" : "no");
    if (!m.audio.bgm_style.empty()) out += " | bgm: " + m.audio.bgm_style;
    for (const auto& e : m.audio.sound_effects) out += " | sfx: " + e;
    if (!m.audio.tone_control.empty()) out += " | tone: " + m.audio.tone_control;
  } else if (dimension == "crossmodal") {
    out = m.main_instruction;
    out += " | dialogue: " + std::string(m.audio.dialogue ? "yes" : "no");
    if (!m.audio.bgm_style.empty()) out += " | bgm: " + m.audio.bgm_style;
  } else {  // stability
    out = "expected duration_sec: " + format_fixed6(m.duration_sec) +
          " | type: " + corpus::to_string(m.video_type);
  }
  return clip(std::move(out));
}

/// Per-tool availability: mean over that tool's trace entries
/// (success 1, fallback 0.5, failure 0); absent from the trace → 0.
double tool_availability_value(const std::vector<media::ToolOutcome>& trace,
                               const std::string& tool) {
  double sum = 0.0;
  int n = 0;
  for (const auto& e : trace) {
    if (e.tool_name != tool) continue;
    sum += status_value(e.status);
    ++n;
  }
  return n == 0 ? 0.0 : sum / n;
}

std::string tool_availability_label(const std::vector<media::ToolOutcome>& trace,
                                    const std::string& tool) {
  std::optional<media::ToolStatus> common;
  bool mixed = false, any = false;
  for (const auto& e : trace) {
    if (e.tool_name != tool) continue;
    if (!any) {
      common = e.status;
      any = true;
    } else if (common != e.status) {
      mixed = true;
    }
  }
  if (!any) return "missing";
  if (mixed) return "partial";
  return media::to_string(*common);
}

std::vector<media::Frame> resolve_rep_frames(const media::PreprocessingOutput& p,
                                             size_t cap = 6) {
  std::vector<media::Frame> out;
  for (int idx : p.rep_frames.per_shot) {
    if (out.size() >= cap) break;
    if (idx >= 0 && static_cast<size_t>(idx) < p.frames.size())
      out.push_back(p.frames[idx]);
  }
  return out;
}

}  // namespace

PipelineAdapters mock_adapters(uint64_t seed) {
  PipelineAdapters a;
  a.tools = media::null_adapters();
  a.vlm = std::make_shared<rubric::NullVlmAdapter>();
  a.judge = std::make_shared<MockJudge>(seed);
  return a;
}

SignalMap collect_signals(const corpus::MetadataEntry& m,
                          const media::PreprocessingOutput& preproc) {
  SignalMap s;
  if (!preproc.boundaries.empty()) {
    double ssim = 0.0, hist = 0.0, flow = 0.0;
    for (const auto& b : preproc.boundaries) {
      ssim += b.ssim;
      hist += b.hist_shift;
      flow += b.flow_magnitude;
    }
    const double n = static_cast<double>(preproc.boundaries.size());
    s["mean_boundary_ssim"] = ssim / n;
    s["mean_boundary_hist_shift"] = hist / n;
    s["mean_flow"] = flow / n;
  }
  if (!preproc.audio.energy_envelope.empty()) {
    const auto& env = preproc.audio.energy_envelope;
    s["audio_energy_mean"] =
        std::accumulate(env.begin(), env.end(), 0.0) / env.size();
  }
  if (preproc.media && preproc.media->duration_sec > 0 && m.duration_sec > 0)
    s["duration_ratio"] = preproc.media->duration_sec / m.duration_sec;
  return s;
}

std::vector<double> luma_motion_series(const std::vector<media::Frame>& frames) {
  std::vector<double> out;
  for (size_t i = 1; i < frames.size(); ++i) {
    const auto& a = frames[i - 1];
    const auto& b = frames[i];
    if (!a.same_size(b) || a.y.empty()) {
      out.push_back(0.0);
      continue;
    }
    double sum = 0.0;
    for (size_t p = 0; p < a.y.size(); ++p)
      sum += std::abs(static_cast<int>(a.y[p]) - static_cast<int>(b.y[p]));
    out.push_back(sum / a.y.size());
  }
  return out;
}

double calibrate_confidence(const rubric::Checkpoint& checkpoint, int ordinal,
                            const std::vector<media::ToolOutcome>& trace,
                            const SignalMap& signals) {
  double availability = 1.0;
  if (!checkpoint.required_tools.empty()) {
    double sum = 0.0;
    for (const auto& tool : checkpoint.required_tools)
      sum += tool_availability_value(trace, tool);
    availability = sum / checkpoint.required_tools.size();
  }

  int fired = 0;
  for (const auto& rule : checkpoint.contradictions) {
    if (ordinal < rule.ordinal_at_least || ordinal > rule.ordinal_at_most) continue;
    const auto it = signals.find(rule.signal);
    if (it == signals.end()) continue;
    const bool outside = (rule.consistent_min && it->second < *rule.consistent_min) ||
                         (rule.consistent_max && it->second > *rule.consistent_max);
    if (outside) ++fired;
  }
  const double agreement = fired == 0 ? 1.0 : fired == 1 ? 0.7 : 0.5;
  return std::clamp(availability * agreement, 0.0, 1.0);
}

double calibrate_confidence(const CheckpointResult& draft, const EvaluationContext& ctx) {
  const rubric::Checkpoint* cp = ctx.registry.find(draft.checkpoint_id);
  if (!cp) throw rubric::RegistryError("unknown checkpoint: " + draft.checkpoint_id);
  return calibrate_confidence(*cp, draft.ordinal, ctx.preproc.trace,
                              collect_signals(ctx.metadata, ctx.preproc));
}

EvidenceBundle build_evidence(const rubric::Checkpoint& checkpoint,
                              const EvaluationContext& ctx,
                              const std::vector<media::ToolOutcome>& trace,
                              const SignalMap& signals,
                              const std::vector<std::string>& phase1_refs) {
  EvidenceBundle ev;
  ev.checkpoint_id = checkpoint.id;
  ev.dimension = checkpoint.dimension;
  ev.metadata_excerpt = metadata_excerpt_for(checkpoint.dimension, ctx.metadata);

  if (needs_tool(checkpoint, "decode") || needs_tool(checkpoint, "rep_frames")) {
    for (int idx : ctx.preproc.rep_frames.per_shot) {
      if (ev.frame_refs.size() >= 6) break;
      ev.frame_refs.push_back(idx);
    }
  }
  if (needs_tool(checkpoint, "asr") && ctx.preproc.transcript) {
    const size_t n = std::min<size_t>(6, ctx.preproc.transcript->segments.size());
    for (size_t i = 0; i < n; ++i) ev.segment_refs.push_back(static_cast<int>(i));
  }
  if (needs_tool(checkpoint, "boundary_metrics") || needs_tool(checkpoint, "shots")) {
    const size_t n = std::min<size_t>(6, ctx.preproc.boundaries.size());
    for (size_t i = 0; i < n; ++i) ev.boundary_refs.push_back(static_cast<int>(i));
  }
  for (const auto& tool : checkpoint.required_tools) {
    for (size_t i = 0; i < trace.size(); ++i)
      if (trace[i].tool_name == tool) ev.tool_trace_refs.push_back(static_cast<int>(i));
    ev.tool_availability.emplace_back(tool, tool_availability_label(trace, tool));
  }
  for (const auto& [name, value] : signals) ev.signals.emplace_back(name, value);
  ev.phase1_refs = phase1_refs;
  return ev;
}

namespace {

CheckpointResult evaluate_checkpoint_gated(const rubric::Checkpoint& checkpoint,
                                           const EvaluationContext& ctx,
                                           const std::vector<media::ToolOutcome>& trace,
                                           const SignalMap& signals, JudgeAdapter& judge,
                                           const std::vector<std::string>& phase1_refs,
                                           const JudgeGate& gate) {
  const EvidenceBundle ev = build_evidence(checkpoint, ctx, trace, signals, phase1_refs);
  CheckpointResult r;
  r.checkpoint_id = checkpoint.id;
  r.evidence_refs = ev.refs();
  r.judge_id = judge.id();
  try {
    JudgeVerdict verdict;
    if (gate.mutex) {
      std::lock_guard<std::mutex> lock(*gate.mutex);
      verdict = judge.judge(checkpoint, ev);
    } else {
      verdict = judge.judge(checkpoint, ev);
    }
    if (verdict.ordinal < 1 || verdict.ordinal > 5)
      throw JudgeError("ordinal out of range: " + std::to_string(verdict.ordinal));
    r.ordinal = verdict.ordinal;
    r.s = rubric::normalize_score(verdict.ordinal);
    r.rationale = verdict.rationale;
    r.confidence = calibrate_confidence(checkpoint, verdict.ordinal, trace, signals);
  } catch (const std::exception& e) {
    r.ordinal = 1;
    r.s = 0.0;
    r.confidence = 0.0;
    r.rationale = std::string("judge failure: ") + e.what();
  }
  return r;
}

std::vector<CheckpointResult> run_specialist_gated(SpecialistKind kind,
                                                   const EvaluationContext& ctx,
                                                   JudgeAdapter& judge,
                                                   const JudgeGate& gate) {
  const auto& owned = specialist_sub_metrics(kind);
  const SignalMap signals = collect_signals(ctx.metadata, ctx.preproc);
  std::vector<CheckpointResult> out;
  for (const auto& cp : ctx.activated) {
    if (std::find(owned.begin(), owned.end(), cp.sub_metric) == owned.end()) continue;
    out.push_back(
        evaluate_checkpoint_gated(cp, ctx, ctx.preproc.trace, signals, judge, {}, gate));
  }
  return out;
}

/// Runs one similarity adapter, honoring forced failures and absent
/// adapters, and appends the outcome (with the canonical tool name and a
/// measured latency) to the run trace.
template <typename Call>
std::optional<double> run_sim_adapter(const std::string& tool_name, bool configured,
                                      const EngineConfig& config, Call&& call,
                                      std::vector<media::ToolOutcome>& run_trace) {
  if (config.tool_forced_to_fail(tool_name)) {
    run_trace.push_back(media::ToolOutcome::failed(tool_name, 0.0, kForcedFailureNote));
    return std::nullopt;
  }
  if (!configured) {
    run_trace.push_back(
        media::ToolOutcome::failed(tool_name, 0.0, "adapter not configured"));
    return std::nullopt;
  }
  const double t0 = now_ms();
  media::AdapterResult<double> res = call();
  res.outcome.tool_name = tool_name;
  res.outcome.latency_ms = now_ms() - t0;
  run_trace.push_back(res.outcome);
  return res.value;
}

}  // namespace

std::vector<CheckpointResult> run_specialist(SpecialistKind kind,
                                             const EvaluationContext& ctx,
                                             JudgeAdapter& judge) {
  return run_specialist_gated(kind, ctx, judge, JudgeGate{});
}

std::vector<CheckpointResult> run_crossmodal(
    const EvaluationContext& ctx,
    const std::map<SpecialistKind, std::vector<CheckpointResult>>& phase1,
    JudgeAdapter& judge, const media::AdapterSet& sim_adapters,
    std::vector<media::ToolOutcome>& run_trace) {
  for (SpecialistKind k : {SpecialistKind::script, SpecialistKind::video,
                           SpecialistKind::audio, SpecialistKind::stability})
    if (!phase1.count(k))
      throw std::invalid_argument(std::string("phase-1 results missing: ") +
                                  to_string(k));

  const auto& owned = crossmodal_sub_metrics();
  std::vector<rubric::Checkpoint> active;
  for (const auto& cp : ctx.activated)
    if (std::find(owned.begin(), owned.end(), cp.sub_metric) != owned.end())
      active.push_back(cp);

  SignalMap signals = collect_signals(ctx.metadata, ctx.preproc);

  const auto requires_any = [&](const std::string& tool) {
    for (const auto& cp : active)
      if (needs_tool(cp, tool)) return true;
    return false;
  };

  if (requires_any("text_video_sim")) {
    const auto value = run_sim_adapter(
        "text_video_sim", sim_adapters.text_video != nullptr, ctx.config,
        [&] {
          return sim_adapters.text_video->similarity(ctx.metadata.main_instruction,
                                                     resolve_rep_frames(ctx.preproc));
        },
        run_trace);
    if (value) signals["text_video_sim"] = *value;
  }
  if (requires_any("lip_sync_proxy")) {
    const auto value = run_sim_adapter(
        "lip_sync_proxy", sim_adapters.lip_sync != nullptr, ctx.config,
        [&] {
          return sim_adapters.lip_sync->correlation(
              luma_motion_series(ctx.preproc.frames),
              ctx.preproc.audio.energy_envelope);
        },
        run_trace);
    if (value) signals["lip_sync_corr"] = *value;
  }

  const auto first_id = [&](SpecialistKind k) -> std::vector<std::string> {
    const auto& rs = phase1.at(k);
    if (rs.empty()) return {};
    return {rs.front().checkpoint_id};
  };

  std::vector<CheckpointResult> out;
  for (const auto& cp : active) {
    const auto refs = cp.sub_metric == "text_video_consistency"
                          ? first_id(SpecialistKind::video)
                          : first_id(SpecialistKind::audio);
    out.push_back(
        evaluate_checkpoint_gated(cp, ctx, run_trace, signals, judge, refs, JudgeGate{}));
  }
  return out;
}

EvaluationContext build_context(const std::string& video_path,
                                const corpus::MetadataEntry& m,
                                const corpus::UserProfile& u,
                                const EngineConfig& config,
                                const PipelineAdapters& adapters, uint64_t seed,
                                const std::string& run_dir) {
  EvaluationContext ctx;
  ctx.metadata = m;
  ctx.profile = u;
  ctx.config = config;
  ctx.seed = seed;
  ctx.registry = rubric::load_registry(config);
  ctx.preproc = media::run_preprocessing(video_path, adapters.tools, config, run_dir);

  rubric::NullVlmAdapter null_vlm;
  rubric::FixtureVlmAdapter forced_vlm({}, media::ToolStatus::failure, kForcedFailureNote);
  rubric::VlmAdapter* vlm = adapters.vlm ? adapters.vlm.get() : &null_vlm;
  if (config.tool_forced_to_fail("vlm")) vlm = &forced_vlm;

  media::FixtureBgmFeatureAdapter forced_bgm({}, media::ToolStatus::failure,
                                             kForcedFailureNote);
  media::BgmFeatureAdapter* bgm = adapters.tools.bgm.get();
  if (config.tool_forced_to_fail("bgm_features")) bgm = &forced_bgm;

  ctx.content_profile =
      rubric::build_content_profile(ctx.preproc, *vlm, bgm, &ctx.preproc.trace);
  ctx.hints.has_story_arc = m.has_story_arc();
  ctx.hints.audio_present = (ctx.preproc.media && ctx.preproc.media->audio_present) ||
                            !ctx.preproc.audio.energy_envelope.empty();
  ctx.activated = rubric::activate_checkpoints(ctx.content_profile, ctx.registry, ctx.hints);
  return ctx;
}

std::string compute_run_id(const std::string& video_path, const std::string& meta_id,
                           const std::string& profile_id, const std::string& judge_id,
                           uint64_t seed) {
  uint64_t h = kFnvOffset;
  std::ifstream in(video_path, std::ios::binary);
  if (in) {
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
      h = fnv1a(std::string_view(buf, static_cast<size_t>(in.gcount())), h);
  }
  h = fnv1a(meta_id, h);
  h = fnv1a("\x1f", h);
  h = fnv1a(profile_id, h);
  h = fnv1a("\x1f", h);
  h = fnv1a(judge_id, h);
  h = fnv1a_u64(seed, h);
  return hex16(h);
}

nlohmann::ordered_json preproc_to_json(const media::PreprocessingOutput& preproc) {
  nlohmann::ordered_json j;
  if (preproc.media) {
    nlohmann::ordered_json m;
    m["duration_sec"] = preproc.media->duration_sec;
    m["width"] = preproc.media->width;
    m["height"] = preproc.media->height;
    m["fps"] = preproc.media->fps;
    m["audio_present"] = preproc.media->audio_present;
    m["audio_sample_rate"] = preproc.media->audio_sample_rate;
    j["media"] = std::move(m);
  } else {
    j["media"] = nullptr;
  }
  j["shots"] = nlohmann::ordered_json::array();
  for (const auto& s : preproc.shots) {
    nlohmann::ordered_json e;
    e["index"] = s.index;
    e["start_frame"] = s.start_frame;
    e["end_frame"] = s.end_frame;
    e["start_sec"] = s.start_sec;
    e["end_sec"] = s.end_sec;
    j["shots"].push_back(std::move(e));
  }
  nlohmann::ordered_json rep;
  rep["per_shot"] = preproc.rep_frames.per_shot;
  rep["first"] = preproc.rep_frames.first ? nlohmann::ordered_json(*preproc.rep_frames.first)
                                          : nlohmann::ordered_json(nullptr);
  rep["last"] = preproc.rep_frames.last ? nlohmann::ordered_json(*preproc.rep_frames.last)
                                        : nlohmann::ordered_json(nullptr);
  j["rep_frames"] = std::move(rep);
  j["boundaries"] = nlohmann::ordered_json::array();
  for (const auto& b : preproc.boundaries) {
    nlohmann::ordered_json e;
    e["boundary_index"] = b.boundary_index;
    e["ssim"] = b.ssim;
    e["hist_shift"] = b.hist_shift;
    e["flow_magnitude"] = b.flow_magnitude;
    j["boundaries"].push_back(std::move(e));
  }
  nlohmann::ordered_json audio;
  audio["sample_rate"] = preproc.audio.sample_rate;
  audio["hops"] = static_cast<int>(preproc.audio.energy_envelope.size());
  audio["separated"] = preproc.audio.separated;
  j["audio"] = std::move(audio);
  if (preproc.transcript) {
    j["transcript"] = nlohmann::ordered_json::array();
    for (const auto& s : preproc.transcript->segments) {
      nlohmann::ordered_json e;
      e["start_sec"] = s.start_sec;
      e["end_sec"] = s.end_sec;
      e["text"] = s.text;
      e["speaker_id"] = s.speaker_id;
      j["transcript"].push_back(std::move(e));
    }
  } else {
    j["transcript"] = nullptr;
  }
  return j;
}

namespace {

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace

diagnosis::DiagnosisReport run_pipeline(const std::string& video_path,
                                        const corpus::MetadataEntry& m,
                                        const corpus::UserProfile& u,
                                        const EngineConfig& config,
                                        const PipelineAdapters& adapters,
                                        uint64_t seed, const std::string& run_dir) {
  std::shared_ptr<JudgeAdapter> judge =
      adapters.judge ? adapters.judge : std::make_shared<MockJudge>(seed);

  const EvaluationContext ctx =
      build_context(video_path, m, u, config, adapters, seed, run_dir);

  std::mutex judge_mutex;
  const JudgeGate gate{config.judge_concurrency <= 1 ? &judge_mutex : nullptr};

  const std::vector<SpecialistKind> kinds = {SpecialistKind::script, SpecialistKind::video,
                                             SpecialistKind::audio,
                                             SpecialistKind::stability};
  std::map<SpecialistKind, std::vector<CheckpointResult>> phase1;
  const size_t parallelism =
      static_cast<size_t>(std::clamp(config.phase1_parallelism, 1, 4));
  if (parallelism <= 1) {
    for (SpecialistKind k : kinds)
      phase1[k] = run_specialist_gated(k, ctx, *judge, gate);
  } else {
    size_t i = 0;
    while (i < kinds.size()) {
      const size_t wave = std::min(parallelism, kinds.size() - i);
      std::vector<std::future<std::vector<CheckpointResult>>> futures;
      for (size_t w = 0; w < wave; ++w) {
        const SpecialistKind k = kinds[i + w];
        futures.push_back(std::async(std::launch::async, [&, k] {
          return run_specialist_gated(k, ctx, *judge, gate);
        }));
      }
      for (size_t w = 0; w < wave; ++w) phase1[kinds[i + w]] = futures[w].get();
      i += wave;
    }
  }

  std::vector<media::ToolOutcome> run_trace = ctx.preproc.trace;
  const std::vector<CheckpointResult> crossmodal =
      run_crossmodal(ctx, phase1, *judge, adapters.tools, run_trace);

  std::vector<CheckpointResult> all;
  for (SpecialistKind k : kinds)
    all.insert(all.end(), phase1[k].begin(), phase1[k].end());
  all.insert(all.end(), crossmodal.begin(), crossmodal.end());
  const auto& canon = rubric::canonical_checkpoint_ids();
  const auto canon_index = [&](const std::string& id) {
    return std::find(canon.begin(), canon.end(), id) - canon.begin();
  };
  std::sort(all.begin(), all.end(), [&](const CheckpointResult& a, const CheckpointResult& b) {
    return canon_index(a.checkpoint_id) < canon_index(b.checkpoint_id);
  });

  const std::string run_id =
      compute_run_id(video_path, m.meta_id, u.profile_id, judge->id(), seed);
  diagnosis::DiagnosisReport report = diagnosis::synthesize_report(
      run_id, m, u, all, ctx.registry, rubric::load_constraints(config), config);

  if (!run_dir.empty()) {
    fs::create_directories(fs::path(run_dir) / "results");
    write_text(fs::path(run_dir) / "preproc.json",
               canonical_dump(preproc_to_json(ctx.preproc)));
    write_text(fs::path(run_dir) / "trace.jsonl", media::trace_to_jsonl(run_trace));
    for (const auto& r : all)
      write_text(fs::path(run_dir) / "results" / (r.checkpoint_id + ".json"),
                 canonical_dump(diagnosis::checkpoint_result_to_json(r)));
    write_text(fs::path(run_dir) / "report.json", diagnosis::serialize_report(report));
  }
  return report;
}

}  // namespace vidiag::pipeline
