#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vidiag::corpus {

enum class VideoType {
  narrative,
  commercial,
  educational,
  scifi,
  cinematic,
  action,
  daily_life,
};

const char* to_string(VideoType t);
std::optional<VideoType> video_type_from_string(const std::string& s);

struct ScriptShot {
  int shot_id = 0;
  double duration_sec = 0.0;
  std::string dialogue;
  std::string narration;
};

struct StoryArc {
  std::string act1_setup;
  std::string act2_conflict;
  std::string act3_resolution;

  bool empty() const {
    return act1_setup.empty() && act2_conflict.empty() && act3_resolution.empty();
  }
};

struct StorySpec {
  StoryArc story_arc;
  std::vector<ScriptShot> script;
  std::string tone_requirements;
};

struct VisualShot {
  int shot_id = 0;
  std::string description;
  std::string camera_movement;
  std::string lighting;
};

struct VisualSpec {
  std::vector<VisualShot> shots;
  std::vector<std::string> camera_requirements;
  std::vector<std::string> consistency_requirements;
};

struct AudioSpec {
  bool dialogue = false;
  bool lip_sync = false;
  std::string bgm_style;
  std::vector<std::string> sound_effects;
  std::string tone_control;
  std::optional<std::string> multi_language;
};

/// Ground-truth intent: the complete objective specification of a target
/// video. Parsed from the external JSON format; keys beginning with "//"
/// are treated as comments and ignored.
struct MetadataEntry {
  std::string meta_id;
  double duration_sec = 0.0;
  VideoType video_type = VideoType::narrative;
  std::string main_instruction;
  StorySpec text;
  VisualSpec visual;
  AudioSpec audio;

  bool has_story_arc() const { return !text.story_arc.empty(); }
};

enum class ExpertiseLevel { novice, intermediate, professional };
enum class ExpressionStyle { conversational, directive, technical, expressive };

const char* to_string(ExpertiseLevel e);
const char* to_string(ExpressionStyle e);
std::optional<ExpertiseLevel> expertise_from_string(const std::string& s);
std::optional<ExpressionStyle> expression_from_string(const std::string& s);

/// Preference weights over the four user-facing dimensions. Must sum to 1.
struct DimensionWeights {
  double story = 0.25;
  double visual = 0.25;
  double audio = 0.25;
  double sync = 0.25;

  double sum() const { return story + visual + audio + sync; }
  double operator[](int i) const {
    switch (i) {
      case 0: return story;
      case 1: return visual;
      case 2: return audio;
      default: return sync;
    }
  }
};

struct UserProfile {
  std::string profile_id;
  DimensionWeights weights;
  std::vector<std::string> hard_constraints;
  std::map<std::string, std::string> taste;
  ExpertiseLevel expertise_level = ExpertiseLevel::intermediate;
  ExpressionStyle expression_style = ExpressionStyle::directive;
};

struct GateVerdict {
  std::string gate_id;
  bool passed = false;
  std::string note;
};

struct PersonalizedPrompt {
  std::string prompt_id;
  std::string meta_id;
  std::string profile_id;
  std::string text;
  int char_count = 0;
  std::vector<GateVerdict> gate_report;

  bool accepted() const {
    if (gate_report.empty()) return false;
    for (const auto& g : gate_report)
      if (!g.passed) return false;
    return true;
  }
};

struct Violation {
  std::string path;     // JSON-pointer-ish path into the document
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
};

}  // namespace vidiag::corpus
