#include "vidiag/corpus/profiles.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace vidiag::corpus {

using nlohmann::json;

const char* to_string(ExpertiseLevel e) {
  switch (e) {
    case ExpertiseLevel::novice: return "novice";
    case ExpertiseLevel::intermediate: return "intermediate";
    case ExpertiseLevel::professional: return "professional";
  }
  return "intermediate";
}

const char* to_string(ExpressionStyle e) {
  switch (e) {
    case ExpressionStyle::conversational: return "conversational";
    case ExpressionStyle::directive: return "directive";
    case ExpressionStyle::technical: return "technical";
    case ExpressionStyle::expressive: return "expressive";
  }
  return "directive";
}

std::optional<ExpertiseLevel> expertise_from_string(const std::string& s) {
  if (s == "novice") return ExpertiseLevel::novice;
  if (s == "intermediate") return ExpertiseLevel::intermediate;
  if (s == "professional") return ExpertiseLevel::professional;
  return std::nullopt;
}

std::optional<ExpressionStyle> expression_from_string(const std::string& s) {
  if (s == "conversational") return ExpressionStyle::conversational;
  if (s == "directive") return ExpressionStyle::directive;
  if (s == "technical") return ExpressionStyle::technical;
  if (s == "expressive") return ExpressionStyle::expressive;
  return std::nullopt;
}

const std::vector<std::string>& hard_constraint_registry() {
  static const std::vector<std::string> ids = {
      "perfect_lip_sync",
      "complete_three_act_arc",
  };
  return ids;
}

void check_profile(const UserProfile& p) {
  const double sum = p.weights.sum();
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "profile '" << p.profile_id << "': weights sum " << sum << " != 1";
    throw ProfileError(msg.str());
  }
  for (int i = 0; i < 4; ++i) {
    if (p.weights[i] < 0.0 || p.weights[i] > 1.0) {
      throw ProfileError("profile '" + p.profile_id + "': weight out of [0,1]");
    }
  }
  const auto& registry = hard_constraint_registry();
  for (const auto& c : p.hard_constraints) {
    if (std::find(registry.begin(), registry.end(), c) == registry.end()) {
      throw ProfileError("profile '" + p.profile_id + "': unknown hard constraint '" + c + "'");
    }
  }
}

const std::vector<UserProfile>& builtin_profiles() {
  static const std::vector<UserProfile> profiles = [] {
    std::vector<UserProfile> v;
    auto add = [&](std::string id, double s, double vi, double a, double sy,
                   std::vector<std::string> constraints, ExpertiseLevel lvl,
                   ExpressionStyle style, std::map<std::string, std::string> taste) {
      UserProfile p;
      p.profile_id = std::move(id);
      p.weights = {s, vi, a, sy};
      p.hard_constraints = std::move(constraints);
      p.expertise_level = lvl;
      p.expression_style = style;
      p.taste = std::move(taste);
      v.push_back(std::move(p));
    };
    add("story_first", 0.55, 0.15, 0.15, 0.15, {"complete_three_act_arc"},
        ExpertiseLevel::intermediate, ExpressionStyle::directive,
        {{"focus_area", "plot_logic"}, {"emotion_depth", "high"}});
    add("visual_heavy", 0.15, 0.50, 0.10, 0.25, {}, ExpertiseLevel::professional,
        ExpressionStyle::technical,
        {{"focus_area", "cinematography"}, {"camera_importance", "high"},
         {"lighting_importance", "high"}});
    add("audio_emotion", 0.20, 0.15, 0.45, 0.20, {}, ExpertiseLevel::intermediate,
        ExpressionStyle::expressive,
        {{"focus_area", "soundscape"}, {"emotion_depth", "high"}});
    add("sync_perfectionist", 0.20, 0.20, 0.20, 0.40, {"perfect_lip_sync"},
        ExpertiseLevel::professional, ExpressionStyle::technical,
        {{"focus_area", "alignment"}, {"precision", "strict"}});
    add("creative_dreamer", 0.25, 0.30, 0.25, 0.20, {}, ExpertiseLevel::novice,
        ExpressionStyle::expressive,
        {{"focus_area", "fantasy_aesthetics"}, {"style", "dreamy"}});
    add("casual_vlogger", 0.30, 0.20, 0.30, 0.20, {}, ExpertiseLevel::novice,
        ExpressionStyle::conversational,
        {{"focus_area", "watchability"}, {"style", "natural"}});
    add("detail_obsessive", 0.25, 0.30, 0.25, 0.20,
        {"perfect_lip_sync", "complete_three_act_arc"}, ExpertiseLevel::professional,
        ExpressionStyle::directive,
        {{"focus_area", "precision"}, {"lighting_importance", "high"},
         {"structure", "strict"}});
    for (const auto& p : v) check_profile(p);
    return v;
  }();
  return profiles;
}

UserProfile neutral_profile() {
  UserProfile p;
  p.profile_id = "neutral";
  p.weights = {0.25, 0.25, 0.25, 0.25};
  p.expertise_level = ExpertiseLevel::intermediate;
  p.expression_style = ExpressionStyle::directive;
  return p;
}

std::vector<UserProfile> parse_profiles(const std::string& json_text) {
  json doc = json::parse(json_text);
  if (!doc.is_array()) {
    throw ProfileError("profiles: document root must be a JSON array");
  }
  std::vector<UserProfile> out;
  for (const auto& j : doc) {
    UserProfile p;
    p.profile_id = j.at("profile_id").get<std::string>();
    const auto& w = j.at("weights");
    p.weights.story = w.at("story").get<double>();
    p.weights.visual = w.at("visual").get<double>();
    p.weights.audio = w.at("audio").get<double>();
    p.weights.sync = w.at("sync").get<double>();
    if (j.contains("hard_constraints")) {
      p.hard_constraints = j.at("hard_constraints").get<std::vector<std::string>>();
    }
    if (j.contains("taste")) {
      p.taste = j.at("taste").get<std::map<std::string, std::string>>();
    }
    if (j.contains("expertise_level")) {
      auto lvl = expertise_from_string(j.at("expertise_level").get<std::string>());
      if (!lvl) throw ProfileError("profiles: unknown expertise_level");
      p.expertise_level = *lvl;
    }
    if (j.contains("expression_style")) {
      auto st = expression_from_string(j.at("expression_style").get<std::string>());
      if (!st) throw ProfileError("profiles: unknown expression_style");
      p.expression_style = *st;
    }
    check_profile(p);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<UserProfile> load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ProfileError("profiles: cannot open " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_profiles(buf.str());
}

}  // namespace vidiag::corpus
