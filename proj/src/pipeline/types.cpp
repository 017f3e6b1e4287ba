#include "vidiag/pipeline/types.h"

namespace vidiag::pipeline {

const char* to_string(SpecialistKind k) {
  switch (k) {
    case SpecialistKind::script: return "script";
    case SpecialistKind::video: return "video";
    case SpecialistKind::audio: return "audio";
    case SpecialistKind::stability: return "stability";
  }
  return "?";
}

const std::vector<std::string>& specialist_sub_metrics(SpecialistKind k) {
  static const std::vector<std::string> script = {"script_reasonableness",
                                                  "narrative_richness"};
  static const std::vector<std::string> video = {"temporal_coherence",
                                                 "lighting_consistency"};
  static const std::vector<std::string> audio = {"bgm_consistency", "narration_quality"};
  static const std::vector<std::string> stability = {"generation_stability"};
  switch (k) {
    case SpecialistKind::script: return script;
    case SpecialistKind::video: return video;
    case SpecialistKind::audio: return audio;
    case SpecialistKind::stability: return stability;
  }
  return stability;
}

const std::vector<std::string>& crossmodal_sub_metrics() {
  static const std::vector<std::string> cm = {"text_video_consistency",
                                              "video_audio_sync"};
  return cm;
}

}  // namespace vidiag::pipeline
