#include "vidiag/rubric/registry.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vidiag_embedded_data.h"

namespace vidiag::rubric {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RegistryError("cannot open data file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_conjuncts(const std::string& predicate) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= predicate.size()) {
    size_t amp = predicate.find("&&", pos);
    std::string tok = predicate.substr(pos, amp == std::string::npos ? amp : amp - pos);
    const auto first = tok.find_first_not_of(" \t");
    const auto last = tok.find_last_not_of(" \t");
    out.push_back(first == std::string::npos ? "" : tok.substr(first, last - first + 1));
    if (amp == std::string::npos) break;
    pos = amp + 2;
  }
  return out;
}

const std::map<std::string, int>& sub_metric_sizes() {
  static const std::map<std::string, int> sizes = {
      {"script_reasonableness", 5}, {"narrative_richness", 3},
      {"temporal_coherence", 7},    {"lighting_consistency", 4},
      {"bgm_consistency", 4},       {"narration_quality", 3},
      {"text_video_consistency", 5}, {"video_audio_sync", 4},
      {"generation_stability", 5},
  };
  return sizes;
}

const std::map<std::string, std::string>& sub_metric_dimensions() {
  static const std::map<std::string, std::string> dims = {
      {"script_reasonableness", "script"}, {"narrative_richness", "script"},
      {"temporal_coherence", "visual"},    {"lighting_consistency", "visual"},
      {"bgm_consistency", "audio"},        {"narration_quality", "audio"},
      {"text_video_consistency", "crossmodal"}, {"video_audio_sync", "crossmodal"},
      {"generation_stability", "stability"},
  };
  return dims;
}

}  // namespace

const Checkpoint* Registry::find(const std::string& id) const {
  for (const auto& c : checkpoints)
    if (c.id == id) return &c;
  return nullptr;
}

const std::vector<std::string>& canonical_checkpoint_ids() {
  static const std::vector<std::string> ids = {
      "event_chain_logic", "character_motivation", "pacing_structure",
      "internal_consistency", "dialogue_naturalness",
      "premise_originality", "narrative_surprise", "visual_creativity",
      "char_face_consistency", "char_clothing_consistency", "object_permanence",
      "background_consistency", "scale_proportion", "motion_continuity",
      "temporal_logic",
      "light_direction", "shadow_consistency", "color_temperature",
      "exposure_stability",
      "bgm_mood_match", "bgm_transition_smoothness", "bgm_tempo_pacing",
      "bgm_volume_balance",
      "speech_timing", "speech_emotion_fit", "speech_intelligibility",
      "scene_presence", "scene_order", "character_matching",
      "hallucinated_content", "setting_accuracy",
      "lip_sync_quality", "sound_event_alignment", "audio_continuity",
      "ambient_sound_match",
      "visual_artifact_frequency", "resolution_sharpness", "temporal_degradation",
      "color_consistency", "duration_completeness",
  };
  return ids;
}

const std::vector<std::string>& canonical_sub_metrics() {
  static const std::vector<std::string> subs = {
      "script_reasonableness", "narrative_richness", "temporal_coherence",
      "lighting_consistency",  "bgm_consistency",    "narration_quality",
      "text_video_consistency", "video_audio_sync",  "generation_stability",
  };
  return subs;
}

const std::vector<std::string>& canonical_dimensions() {
  static const std::vector<std::string> dims = {"script", "visual", "audio",
                                                "crossmodal", "stability"};
  return dims;
}

const std::string& dimension_of_sub_metric(const std::string& sub_metric) {
  const auto& dims = sub_metric_dimensions();
  auto it = dims.find(sub_metric);
  if (it == dims.end()) throw RegistryError("unknown sub-metric: " + sub_metric);
  return it->second;
}

const std::vector<std::string>& predicate_attribute_names() {
  static const std::vector<std::string> names = {
      "has_characters", "has_dialogue", "has_held_objects", "has_animals",
      "has_scene_changes", "is_single_shot", "has_text_overlay",
      "has_special_effects", "is_live_action_style", "is_animation_style",
      "has_background_music", "has_camera_movement", "has_fast_motion",
      "has_slow_motion", "has_story_arc", "audio_present",
  };
  return names;
}

const std::vector<std::string>& known_tool_names() {
  static const std::vector<std::string> names = {
      "probe", "decode", "shots", "rep_frames", "boundary_metrics",
      "audio_features", "asr", "source_separation",
      "vlm", "bgm_features", "text_video_sim", "text_audio_sim", "lip_sync_proxy",
  };
  return names;
}

Registry parse_registry(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw RegistryError(std::string("registry: invalid JSON: ") + e.what());
  }
  Registry reg;
  try {
    for (const auto& j : doc.at("checkpoints")) {
      Checkpoint c;
      c.id = j.at("id").get<std::string>();
      c.sub_metric = j.at("sub_metric").get<std::string>();
      c.dimension = j.at("dimension").get<std::string>();
      c.predicate = j.at("predicate").get<std::string>();
      c.weight = j.value("weight", 1.0);
      const auto& anchors = j.at("anchors");
      if (!anchors.is_array() || anchors.size() != 5)
        throw RegistryError("registry: checkpoint '" + c.id + "' needs exactly 5 anchors");
      for (size_t i = 0; i < 5; ++i) c.anchors[i] = anchors[i].get<std::string>();
      for (const auto& t : j.value("required_tools", json::array()))
        c.required_tools.push_back(t.get<std::string>());
      for (const auto& r : j.value("contradictions", json::array())) {
        ContradictionRule rule;
        rule.signal = r.at("signal").get<std::string>();
        rule.ordinal_at_least = r.value("ordinal_at_least", 1);
        rule.ordinal_at_most = r.value("ordinal_at_most", 5);
        if (r.contains("consistent_min"))
          rule.consistent_min = r.at("consistent_min").get<double>();
        if (r.contains("consistent_max"))
          rule.consistent_max = r.at("consistent_max").get<double>();
        c.contradictions.push_back(std::move(rule));
      }
      reg.checkpoints.push_back(std::move(c));
    }
    for (const auto& s : doc.value("signals", json::array()))
      reg.signals.push_back(s.get<std::string>());
  } catch (const RegistryError&) {
    throw;
  } catch (const json::exception& e) {
    throw RegistryError(std::string("registry: malformed document: ") + e.what());
  }
  return reg;
}

void audit_registry(const Registry& registry) {
  if (registry.checkpoints.size() != 40)
    throw RegistryError("registry: expected 40 checkpoints, found " +
                        std::to_string(registry.checkpoints.size()));

  const auto& canon = canonical_checkpoint_ids();
  std::set<std::string> seen;
  std::map<std::string, int> per_sub;
  for (const auto& c : registry.checkpoints) {
    if (!seen.insert(c.id).second)
      throw RegistryError("registry: duplicate checkpoint id '" + c.id + "'");
    if (std::find(canon.begin(), canon.end(), c.id) == canon.end())
      throw RegistryError("registry: unknown checkpoint id '" + c.id + "'");
    if (sub_metric_sizes().count(c.sub_metric) == 0)
      throw RegistryError("registry: checkpoint '" + c.id + "' has unknown sub-metric '" +
                          c.sub_metric + "'");
    if (dimension_of_sub_metric(c.sub_metric) != c.dimension)
      throw RegistryError("registry: checkpoint '" + c.id + "' dimension '" + c.dimension +
                          "' does not match its sub-metric");
    if (!(c.weight > 0))
      throw RegistryError("registry: checkpoint '" + c.id + "' weight must be positive");
    for (const auto& a : c.anchors)
      if (a.empty())
        throw RegistryError("registry: checkpoint '" + c.id + "' has an empty anchor");

    for (const auto& conjunct : split_conjuncts(c.predicate)) {
      if (conjunct == "true") continue;
      const auto& names = predicate_attribute_names();
      if (std::find(names.begin(), names.end(), conjunct) == names.end())
        throw RegistryError("registry: checkpoint '" + c.id +
                            "' predicate references unknown attribute '" + conjunct + "'");
    }
    for (const auto& t : c.required_tools) {
      const auto& tools = known_tool_names();
      if (std::find(tools.begin(), tools.end(), t) == tools.end())
        throw RegistryError("registry: checkpoint '" + c.id +
                            "' requires unknown tool '" + t + "'");
    }
    for (const auto& rule : c.contradictions) {
      if (rule.ordinal_at_least < 1 || rule.ordinal_at_most > 5 ||
          rule.ordinal_at_least > rule.ordinal_at_most)
        throw RegistryError("registry: checkpoint '" + c.id +
                            "' has an invalid contradiction ordinal range");
      if (!rule.consistent_min && !rule.consistent_max)
        throw RegistryError("registry: checkpoint '" + c.id +
                            "' contradiction rule declares no consistent range");
      if (!registry.signals.empty() &&
          std::find(registry.signals.begin(), registry.signals.end(), rule.signal) ==
              registry.signals.end())
        throw RegistryError("registry: checkpoint '" + c.id +
                            "' contradiction uses undeclared signal '" + rule.signal + "'");
    }
    per_sub[c.sub_metric]++;
  }

  for (const auto& [sub, expected] : sub_metric_sizes()) {
    const int got = per_sub.count(sub) ? per_sub[sub] : 0;
    if (got != expected)
      throw RegistryError("registry: sub-metric '" + sub + "' has " + std::to_string(got) +
                          " checkpoints, expected " + std::to_string(expected));
  }
}

const Registry& builtin_registry() {
  static const Registry reg = [] {
    Registry r = parse_registry(embedded::kRegistryJson);
    audit_registry(r);
    return r;
  }();
  return reg;
}

Registry load_registry(const EngineConfig& config) {
  if (config.registry_path.empty()) return builtin_registry();
  Registry r = parse_registry(read_file(config.registry_path));
  audit_registry(r);
  return r;
}

std::vector<HardConstraintRule> parse_constraints(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw RegistryError(std::string("constraints: invalid JSON: ") + e.what());
  }
  std::vector<HardConstraintRule> rules;
  try {
    for (const auto& j : doc.at("constraints")) {
      HardConstraintRule r;
      r.id = j.at("id").get<std::string>();
      r.checkpoint_id = j.at("checkpoint_id").get<std::string>();
      r.violation_threshold = j.value("violation_threshold", 0.5);
      rules.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw RegistryError(std::string("constraints: malformed document: ") + e.what());
  }
  const auto& canon = canonical_checkpoint_ids();
  for (const auto& r : rules) {
    if (std::find(canon.begin(), canon.end(), r.checkpoint_id) == canon.end())
      throw RegistryError("constraints: '" + r.id + "' maps to unknown checkpoint '" +
                          r.checkpoint_id + "'");
  }
  return rules;
}

const std::vector<HardConstraintRule>& builtin_constraints() {
  static const std::vector<HardConstraintRule> rules =
      parse_constraints(embedded::kConstraintsJson);
  return rules;
}

std::vector<HardConstraintRule> load_constraints(const EngineConfig& config) {
  if (config.constraints_path.empty()) return builtin_constraints();
  return parse_constraints(read_file(config.constraints_path));
}

}  // namespace vidiag::rubric
