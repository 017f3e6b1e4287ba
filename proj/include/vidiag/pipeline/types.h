#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vidiag/config.h"
#include "vidiag/corpus/types.h"
#include "vidiag/media/types.h"
#include "vidiag/rubric/profile.h"
#include "vidiag/rubric/registry.h"

namespace vidiag::pipeline {

/// The four Phase-1 evaluators. The cross-modal evaluator is Phase 2 and
/// owns the two remaining sub-metrics.
enum class SpecialistKind { script, video, audio, stability };

const char* to_string(SpecialistKind k);

/// Sub-metrics owned by a Phase-1 specialist. Together with the
/// cross-modal pair this partitions all nine sub-metrics.
const std::vector<std::string>& specialist_sub_metrics(SpecialistKind k);
const std::vector<std::string>& crossmodal_sub_metrics();

/// One judged checkpoint. s is the normalized ordinal (ordinal-1)/4;
/// confidence comes from calibration, never from the judge itself.
struct CheckpointResult {
  std::string checkpoint_id;
  int ordinal = 1;
  double s = 0.0;
  double confidence = 0.0;
  std::vector<std::string> evidence_refs;  // "trace:i" | "frame:i" | "segment:i" | "boundary:i" | "result:id"
  std::string rationale;
  std::string judge_id;
};

/// Everything the evaluators read. Frozen before Phase 1 starts and never
/// mutated afterwards; the run trace grows separately.
struct EvaluationContext {
  corpus::MetadataEntry metadata;
  corpus::UserProfile profile;
  media::PreprocessingOutput preproc;  // trace covers Phase 0 incl. vlm/bgm
  rubric::ContentProfile content_profile;
  rubric::ActivationHints hints;
  std::vector<rubric::Checkpoint> activated;
  rubric::Registry registry;
  EngineConfig config;
  uint64_t seed = 0;
};

}  // namespace vidiag::pipeline
