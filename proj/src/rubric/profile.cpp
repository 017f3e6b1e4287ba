#include "vidiag/rubric/profile.h"

#include <algorithm>
#include <stdexcept>

#include "vidiag/media/audio.h"

namespace vidiag::rubric {

using media::AdapterResult;
using media::ToolOutcome;
using media::ToolStatus;
using nlohmann::json;

json profile_to_json(const ContentProfile& p) {
  return json{{"has_characters", p.has_characters},
              {"character_count", p.character_count},
              {"has_dialogue", p.has_dialogue},
              {"has_held_objects", p.has_held_objects},
              {"has_animals", p.has_animals},
              {"scene_count", p.scene_count},
              {"has_scene_changes", p.has_scene_changes},
              {"is_single_shot", p.is_single_shot},
              {"has_text_overlay", p.has_text_overlay},
              {"has_special_effects", p.has_special_effects},
              {"is_live_action_style", p.is_live_action_style},
              {"is_animation_style", p.is_animation_style},
              {"has_background_music", p.has_background_music},
              {"has_camera_movement", p.has_camera_movement},
              {"has_fast_motion", p.has_fast_motion},
              {"has_slow_motion", p.has_slow_motion},
              {"vlm_char_count", p.vlm_char_count},
              {"asr_speaker_count", p.asr_speaker_count}};
}

ContentProfile profile_from_json(const json& j) {
  ContentProfile p;
  p.has_characters = j.at("has_characters").get<bool>();
  p.character_count = j.at("character_count").get<int>();
  p.has_dialogue = j.at("has_dialogue").get<bool>();
  p.has_held_objects = j.at("has_held_objects").get<bool>();
  p.has_animals = j.at("has_animals").get<bool>();
  p.scene_count = j.at("scene_count").get<int>();
  p.has_scene_changes = j.at("has_scene_changes").get<bool>();
  p.is_single_shot = j.at("is_single_shot").get<bool>();
  p.has_text_overlay = j.at("has_text_overlay").get<bool>();
  p.has_special_effects = j.at("has_special_effects").get<bool>();
  p.is_live_action_style = j.at("is_live_action_style").get<bool>();
  p.is_animation_style = j.at("is_animation_style").get<bool>();
  p.has_background_music = j.at("has_background_music").get<bool>();
  p.has_camera_movement = j.at("has_camera_movement").get<bool>();
  p.has_fast_motion = j.at("has_fast_motion").get<bool>();
  p.has_slow_motion = j.at("has_slow_motion").get<bool>();
  p.vlm_char_count = j.at("vlm_char_count").get<int>();
  p.asr_speaker_count = j.at("asr_speaker_count").get<int>();
  return p;
}

AdapterResult<VlmObservation> NullVlmAdapter::analyze(const std::vector<media::Frame>&) {
  AdapterResult<VlmObservation> r;
  r.outcome = ToolOutcome::degraded("vlm", 0, {{"char_count", 0}},
                                    "null adapter: conservative defaults");
  r.value = VlmObservation{};
  return r;
}

FixtureVlmAdapter::FixtureVlmAdapter(VlmObservation value, ToolStatus status,
                                     std::string note)
    : value_(value), status_(status), note_(std::move(note)) {}

AdapterResult<VlmObservation> FixtureVlmAdapter::analyze(
    const std::vector<media::Frame>&) {
  AdapterResult<VlmObservation> r;
  if (status_ == ToolStatus::failure) {
    r.outcome = ToolOutcome::failed("vlm", 0, note_.empty() ? "fixture failure" : note_);
    return r;
  }
  json payload = {{"char_count", value_.char_count},
                  {"live_action", value_.is_live_action_style},
                  {"animation", value_.is_animation_style}};
  if (status_ == ToolStatus::fallback) {
    r.outcome = ToolOutcome::degraded("vlm", 0, std::move(payload),
                                      note_.empty() ? "fixture fallback" : note_);
  } else {
    r.outcome = ToolOutcome::ok("vlm", 0, std::move(payload));
    r.outcome.note = note_;
  }
  r.value = value_;
  return r;
}

ContentProfile build_content_profile(const media::PreprocessingOutput& preproc,
                                     VlmAdapter& vlm, media::BgmFeatureAdapter* bgm,
                                     std::vector<media::ToolOutcome>* trace) {
  ContentProfile p;

  // Scene structure follows the shot list directly.
  p.scene_count = static_cast<int>(preproc.shots.size());
  p.has_scene_changes = preproc.shots.size() > 1;
  p.is_single_shot = preproc.shots.size() == 1;

  // Dialogue signals from ASR.
  if (preproc.transcript.has_value()) {
    p.has_dialogue = !preproc.transcript->segments.empty();
    p.asr_speaker_count = preproc.transcript->speaker_count();
  }

  // VLM pass over the representative frames.
  std::vector<media::Frame> rep;
  for (int idx : preproc.rep_frames.per_shot)
    if (idx >= 0 && idx < static_cast<int>(preproc.frames.size()))
      rep.push_back(preproc.frames[idx]);
  AdapterResult<VlmObservation> vres = vlm.analyze(rep);
  vres.outcome.tool_name = "vlm";
  const bool vlm_ok = vres.outcome.status == ToolStatus::success && vres.value.has_value();
  if (vlm_ok) {
    const VlmObservation& obs = *vres.value;
    p.vlm_char_count = obs.char_count;
    p.has_animals = obs.has_animals;
    p.has_held_objects = obs.has_held_objects;
    p.has_text_overlay = obs.has_text_overlay;
    p.has_special_effects = obs.has_special_effects;
    p.is_live_action_style = obs.is_live_action_style;
    p.is_animation_style = obs.is_animation_style;
    if (p.is_live_action_style && p.is_animation_style) {
      p.is_live_action_style = false;
      p.is_animation_style = false;
      if (!vres.outcome.note.empty()) vres.outcome.note += "; ";
      vres.outcome.note += "contradictory style flags cleared";
    }
    p.has_camera_movement = obs.has_camera_movement;
    p.has_fast_motion = obs.has_fast_motion;
    p.has_slow_motion = obs.has_slow_motion;
  }

  p.character_count = std::max(p.vlm_char_count, p.asr_speaker_count);
  p.has_characters = vlm_ok && p.character_count > 0;

  // Background music: trust a successful BGM adapter, otherwise fall back
  // to the sustained-energy heuristic on the envelope.
  std::optional<ToolOutcome> bgm_outcome;
  bool decided = false;
  if (bgm != nullptr) {
    AdapterResult<media::BgmSummary> bres = bgm->analyze(preproc.audio);
    bres.outcome.tool_name = "bgm_features";
    if (bres.outcome.status == ToolStatus::success && bres.value.has_value()) {
      p.has_background_music = bres.value->music_present;
      decided = true;
    }
    bgm_outcome = std::move(bres.outcome);
  }
  if (!decided)
    p.has_background_music = media::sustained_energy(preproc.audio.energy_envelope);

  if (trace != nullptr) {
    trace->push_back(std::move(vres.outcome));
    if (bgm_outcome) trace->push_back(std::move(*bgm_outcome));
  }
  return p;
}

std::optional<bool> lookup_attribute(const ContentProfile& profile,
                                     const ActivationHints& hints,
                                     const std::string& name) {
  if (name == "has_characters") return profile.has_characters;
  if (name == "has_dialogue") return profile.has_dialogue;
  if (name == "has_held_objects") return profile.has_held_objects;
  if (name == "has_animals") return profile.has_animals;
  if (name == "has_scene_changes") return profile.has_scene_changes;
  if (name == "is_single_shot") return profile.is_single_shot;
  if (name == "has_text_overlay") return profile.has_text_overlay;
  if (name == "has_special_effects") return profile.has_special_effects;
  if (name == "is_live_action_style") return profile.is_live_action_style;
  if (name == "is_animation_style") return profile.is_animation_style;
  if (name == "has_background_music") return profile.has_background_music;
  if (name == "has_camera_movement") return profile.has_camera_movement;
  if (name == "has_fast_motion") return profile.has_fast_motion;
  if (name == "has_slow_motion") return profile.has_slow_motion;
  if (name == "has_story_arc") return hints.has_story_arc;
  if (name == "audio_present") return hints.audio_present;
  return std::nullopt;
}

std::vector<Checkpoint> activate_checkpoints(const ContentProfile& profile,
                                             const Registry& registry,
                                             const ActivationHints& hints) {
  std::vector<Checkpoint> active;
  for (const auto& c : registry.checkpoints) {
    bool holds = true;
    size_t pos = 0;
    const std::string& pred = c.predicate;
    while (holds && pos <= pred.size()) {
      size_t amp = pred.find("&&", pos);
      std::string tok = pred.substr(pos, amp == std::string::npos ? amp : amp - pos);
      const auto first = tok.find_first_not_of(" \t");
      const auto last = tok.find_last_not_of(" \t");
      tok = first == std::string::npos ? "" : tok.substr(first, last - first + 1);
      if (tok != "true" && !tok.empty()) {
        auto value = lookup_attribute(profile, hints, tok);
        if (!value)
          throw RegistryError("predicate for '" + c.id + "' references unknown attribute '" +
                              tok + "'");
        holds = *value;
      }
      if (amp == std::string::npos) break;
      pos = amp + 2;
    }
    if (holds) active.push_back(c);
  }
  return active;
}

double normalize_score(int ordinal) {
  if (ordinal < 1 || ordinal > 5)
    throw std::out_of_range("ordinal must be in 1..5, got " + std::to_string(ordinal));
  return (ordinal - 1) / 4.0;
}

std::optional<double> submetric_score(
    const std::vector<std::pair<std::string, double>>& id_scores,
    const Registry& registry) {
  if (id_scores.empty()) return std::nullopt;
  std::string sub;
  double weighted = 0.0, total = 0.0;
  for (const auto& [id, s] : id_scores) {
    const Checkpoint* c = registry.find(id);
    if (c == nullptr) throw RegistryError("submetric_score: unknown checkpoint '" + id + "'");
    if (sub.empty())
      sub = c->sub_metric;
    else if (c->sub_metric != sub)
      throw RegistryError("submetric_score: mixed sub-metrics '" + sub + "' and '" +
                          c->sub_metric + "'");
    weighted += c->weight * s;
    total += c->weight;
  }
  return weighted / total;
}

}  // namespace vidiag::rubric
