#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "vidiag/diagnosis/report.h"
#include "vidiag/media/adapters.h"
#include "vidiag/pipeline/judge.h"
#include "vidiag/pipeline/types.h"
#include "vidiag/rubric/profile.h"

namespace vidiag::pipeline {

/// Everything pluggable: media tool adapters, the content-profile VLM,
/// and the judge backend. Null/Mock members keep the pipeline runnable
/// without any external service.
struct PipelineAdapters {
  media::AdapterSet tools;
  std::shared_ptr<rubric::VlmAdapter> vlm;
  std::shared_ptr<JudgeAdapter> judge;
};

/// Null tool adapters, null VLM, MockJudge(seed).
PipelineAdapters mock_adapters(uint64_t seed = 0);

/// Evidence signals checked against the per-checkpoint contradiction
/// ranges. Keys are the registry's declared signal names; a key is absent
/// when its source tool produced nothing.
using SignalMap = std::map<std::string, double>;

SignalMap collect_signals(const corpus::MetadataEntry& m,
                          const media::PreprocessingOutput& preproc);

/// Mean absolute luma difference between consecutive frames; the motion
/// proxy fed to the lip-sync adapter.
std::vector<double> luma_motion_series(const std::vector<media::Frame>& frames);

/// confidence = availability × agreement. Availability averages the
/// required tools' statuses (success 1, fallback 0.5, failure/missing 0;
/// multi-entry tools contribute the mean over their entries). Agreement is
/// 1.0 / 0.7 / 0.5 for 0 / 1 / ≥2 fired contradiction rules. The judge's
/// self_report never enters.
double calibrate_confidence(const rubric::Checkpoint& checkpoint, int ordinal,
                            const std::vector<media::ToolOutcome>& trace,
                            const SignalMap& signals);
double calibrate_confidence(const CheckpointResult& draft, const EvaluationContext& ctx);

EvidenceBundle build_evidence(const rubric::Checkpoint& checkpoint,
                              const EvaluationContext& ctx,
                              const std::vector<media::ToolOutcome>& trace,
                              const SignalMap& signals,
                              const std::vector<std::string>& phase1_refs = {});

/// Judges one checkpoint. A judge hard-failure yields ordinal 1, s 0,
/// confidence 0 and a failure rationale instead of propagating.
CheckpointResult evaluate_checkpoint(const rubric::Checkpoint& checkpoint,
                                     const EvaluationContext& ctx,
                                     const std::vector<media::ToolOutcome>& trace,
                                     const SignalMap& signals, JudgeAdapter& judge,
                                     const std::vector<std::string>& phase1_refs = {});

/// Phase 1: one result per activated checkpoint owned by the specialist.
std::vector<CheckpointResult> run_specialist(SpecialistKind kind,
                                             const EvaluationContext& ctx,
                                             JudgeAdapter& judge);

/// Phase 2: requires all four Phase-1 result sets (throws
/// std::invalid_argument otherwise). Runs the similarity adapters the
/// activated checkpoints need, appends their outcomes to run_trace, and
/// judges the two cross-modal sub-metrics. Every result cites at least
/// one tool-derived evidence item.
std::vector<CheckpointResult> run_crossmodal(
    const EvaluationContext& ctx,
    const std::map<SpecialistKind, std::vector<CheckpointResult>>& phase1,
    JudgeAdapter& judge, const media::AdapterSet& sim_adapters,
    std::vector<media::ToolOutcome>& run_trace);

/// Phase 0: preprocessing, content profiling (VLM + BGM outcomes are
/// appended to the preproc trace), activation. The returned context is
/// frozen for the rest of the run.
EvaluationContext build_context(const std::string& video_path,
                                const corpus::MetadataEntry& m,
                                const corpus::UserProfile& u,
                                const EngineConfig& config,
                                const PipelineAdapters& adapters, uint64_t seed,
                                const std::string& run_dir = "");

/// Stable id of one evaluation: digest of (video bytes, meta_id,
/// profile_id, judge id, seed).
std::string compute_run_id(const std::string& video_path, const std::string& meta_id,
                           const std::string& profile_id, const std::string& judge_id,
                           uint64_t seed);

nlohmann::ordered_json preproc_to_json(const media::PreprocessingOutput& preproc);

/// The full four-phase run. When run_dir is non-empty writes
/// <run>/preproc.json, <run>/trace.jsonl, <run>/results/<checkpoint>.json
/// and <run>/report.json. With MockJudge the returned report (and its
/// serialized bytes) is a deterministic function of
/// (video bytes, m, u, config, seed).
diagnosis::DiagnosisReport run_pipeline(const std::string& video_path,
                                        const corpus::MetadataEntry& m,
                                        const corpus::UserProfile& u,
                                        const EngineConfig& config,
                                        const PipelineAdapters& adapters,
                                        uint64_t seed = 0,
                                        const std::string& run_dir = "");

}  // namespace vidiag::pipeline
