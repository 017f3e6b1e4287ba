#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vidiag/media/adapters.h"
#include "vidiag/media/preprocess.h"
#include "vidiag/rubric/registry.h"

namespace vidiag::rubric {

/// The 18-attribute content profile driving checkpoint activation.
/// character_count is derived: max(vlm_char_count, asr_speaker_count).
struct ContentProfile {
  // entity
  bool has_characters = false;
  int character_count = 0;
  bool has_dialogue = false;
  bool has_held_objects = false;
  bool has_animals = false;
  // scene structure
  int scene_count = 0;
  bool has_scene_changes = false;
  bool is_single_shot = false;
  // style/content
  bool has_text_overlay = false;
  bool has_special_effects = false;
  bool is_live_action_style = false;
  bool is_animation_style = false;
  bool has_background_music = false;
  // motion
  bool has_camera_movement = false;
  bool has_fast_motion = false;
  bool has_slow_motion = false;
  // fusion signals
  int vlm_char_count = 0;
  int asr_speaker_count = 0;
};

nlohmann::json profile_to_json(const ContentProfile& p);
ContentProfile profile_from_json(const nlohmann::json& j);

/// What the fast VLM pass reports about the representative frames.
struct VlmObservation {
  int char_count = 0;
  bool has_animals = false;
  bool has_held_objects = false;
  bool has_text_overlay = false;
  bool has_special_effects = false;
  bool is_live_action_style = false;
  bool is_animation_style = false;
  bool has_camera_movement = false;
  bool has_fast_motion = false;
  bool has_slow_motion = false;
};

class VlmAdapter {
 public:
  virtual ~VlmAdapter() = default;
  virtual media::AdapterResult<VlmObservation> analyze(
      const std::vector<media::Frame>& rep_frames) = 0;
};

/// Always fallback: conservative all-false observation.
class NullVlmAdapter final : public VlmAdapter {
 public:
  media::AdapterResult<VlmObservation> analyze(
      const std::vector<media::Frame>& rep_frames) override;
};

class FixtureVlmAdapter final : public VlmAdapter {
 public:
  FixtureVlmAdapter(VlmObservation value,
                    media::ToolStatus status = media::ToolStatus::success,
                    std::string note = "");
  media::AdapterResult<VlmObservation> analyze(
      const std::vector<media::Frame>& rep_frames) override;

 private:
  VlmObservation value_;
  media::ToolStatus status_;
  std::string note_;
};

/// Builds the content profile from preprocessing signals plus a VLM pass
/// over the representative frames. VLM failure degrades the visual
/// attributes to conservative defaults; background music falls back to the
/// energy heuristic when the BGM adapter cannot answer. The vlm/bgm tool
/// outcomes are appended to *trace when provided.
ContentProfile build_content_profile(const media::PreprocessingOutput& preproc,
                                     VlmAdapter& vlm,
                                     media::BgmFeatureAdapter* bgm = nullptr,
                                     std::vector<media::ToolOutcome>* trace = nullptr);

/// Metadata-level activation hints that are not content-profile attributes.
struct ActivationHints {
  bool has_story_arc = false;
  bool audio_present = false;
};

/// Evaluates one predicate-language attribute over profile + hints.
/// Unknown names return nullopt.
std::optional<bool> lookup_attribute(const ContentProfile& profile,
                                     const ActivationHints& hints,
                                     const std::string& name);

/// Deterministic subset of the registry whose predicates hold.
std::vector<Checkpoint> activate_checkpoints(const ContentProfile& profile,
                                             const Registry& registry,
                                             const ActivationHints& hints = {});

/// (ordinal - 1) / 4 with ordinal in 1..5; throws std::out_of_range.
double normalize_score(int ordinal);

/// Weighted mean of checkpoint scores within one sub-metric, weights
/// renormalized over the supplied subset. Empty input -> nullopt
/// ("not evaluated"); mixed sub-metrics or unknown ids -> RegistryError.
std::optional<double> submetric_score(
    const std::vector<std::pair<std::string, double>>& id_scores,
    const Registry& registry);

}  // namespace vidiag::rubric
