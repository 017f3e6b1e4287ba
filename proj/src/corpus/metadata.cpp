#include "vidiag/corpus/metadata.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace vidiag::corpus {

using nlohmann::json;

const char* to_string(VideoType t) {
  switch (t) {
    case VideoType::narrative: return "narrative";
    case VideoType::commercial: return "commercial";
    case VideoType::educational: return "educational";
    case VideoType::scifi: return "scifi";
    case VideoType::cinematic: return "cinematic";
    case VideoType::action: return "action";
    case VideoType::daily_life: return "daily_life";
  }
  return "narrative";
}

std::optional<VideoType> video_type_from_string(const std::string& s) {
  static const std::map<std::string, VideoType> table = {
      {"narrative", VideoType::narrative},   {"commercial", VideoType::commercial},
      {"educational", VideoType::educational}, {"scifi", VideoType::scifi},
      {"cinematic", VideoType::cinematic},   {"action", VideoType::action},
      {"daily_life", VideoType::daily_life},
  };
  auto it = table.find(s);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

namespace {

// Lookup by exact key. Comment keys ("// ...") and other unknown keys are
// never looked up, so they are ignored by construction.
const json* find_key(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) return nullptr;
  return &*it;
}

const json& require_key(const json& obj, const char* key, const std::string& where) {
  const json* v = find_key(obj, key);
  if (!v) {
    throw MetadataParseError("metadata: missing key '" + std::string(key) + "' at " + where);
  }
  return *v;
}

std::string get_string(const json& obj, const char* key, const std::string& where,
                       const std::string& fallback = "") {
  const json* v = find_key(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) {
    throw MetadataParseError("metadata: '" + std::string(key) + "' at " + where +
                             " must be a string");
  }
  return v->get<std::string>();
}

// Computes a 1-based line number for a byte offset in the source text.
size_t line_of_byte(const std::string& text, size_t byte) {
  size_t line = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

MetadataEntry parse_metadata(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    std::ostringstream msg;
    msg << "metadata: parse error at byte " << e.byte << " (line "
        << line_of_byte(json_text, e.byte) << "): " << e.what();
    throw MetadataParseError(msg.str());
  }
  if (!doc.is_object()) {
    throw MetadataParseError("metadata: document root must be an object");
  }

  MetadataEntry m;
  m.meta_id = get_string(doc, "meta_id", "$");
  const json& dur = require_key(doc, "duration_sec", "$");
  if (!dur.is_number()) throw MetadataParseError("metadata: duration_sec must be a number");
  m.duration_sec = dur.get<double>();

  std::string type_str = require_key(doc, "video_type", "$").get<std::string>();
  auto vt = video_type_from_string(type_str);
  if (!vt) {
    throw MetadataParseError("metadata: unknown video_type '" + type_str + "'");
  }
  m.video_type = *vt;
  m.main_instruction = get_string(doc, "main_instruction", "$");

  const json& mod = require_key(doc, "modality_details", "$");

  if (const json* text = find_key(mod, "text")) {
    if (const json* arc = find_key(*text, "story_arc")) {
      m.text.story_arc.act1_setup = get_string(*arc, "act1_setup", "story_arc");
      m.text.story_arc.act2_conflict = get_string(*arc, "act2_conflict", "story_arc");
      m.text.story_arc.act3_resolution = get_string(*arc, "act3_resolution", "story_arc");
    }
    if (const json* script = find_key(*text, "script")) {
      for (const auto& s : *script) {
        ScriptShot shot;
        shot.shot_id = require_key(s, "shot_id", "script").get<int>();
        shot.duration_sec = require_key(s, "duration_sec", "script").get<double>();
        shot.dialogue = get_string(s, "dialogue", "script");
        shot.narration = get_string(s, "narration", "script");
        m.text.script.push_back(std::move(shot));
      }
    }
    m.text.tone_requirements = get_string(*text, "tone_requirements", "text");
  }

  if (const json* visual = find_key(mod, "visual")) {
    if (const json* shots = find_key(*visual, "shots")) {
      for (const auto& s : *shots) {
        VisualShot shot;
        shot.shot_id = require_key(s, "shot_id", "visual.shots").get<int>();
        shot.description = get_string(s, "description", "visual.shots");
        shot.camera_movement = get_string(s, "camera_movement", "visual.shots");
        shot.lighting = get_string(s, "lighting", "visual.shots");
        m.visual.shots.push_back(std::move(shot));
      }
    }
    if (const json* reqs = find_key(*visual, "camera_requirements")) {
      m.visual.camera_requirements = reqs->get<std::vector<std::string>>();
    }
    if (const json* reqs = find_key(*visual, "consistency_requirements")) {
      m.visual.consistency_requirements = reqs->get<std::vector<std::string>>();
    }
  }

  if (const json* audio = find_key(mod, "audio")) {
    if (const json* v = find_key(*audio, "dialogue")) m.audio.dialogue = v->get<bool>();
    if (const json* v = find_key(*audio, "lip_sync")) m.audio.lip_sync = v->get<bool>();
    m.audio.bgm_style = get_string(*audio, "bgm_style", "audio");
    if (const json* v = find_key(*audio, "sound_effects")) {
      m.audio.sound_effects = v->get<std::vector<std::string>>();
    }
    m.audio.tone_control = get_string(*audio, "tone_control", "audio");
    if (const json* v = find_key(*audio, "multi_language"); v && v->is_string()) {
      m.audio.multi_language = v->get<std::string>();
    }
  }

  return m;
}

MetadataEntry load_metadata_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw MetadataParseError("metadata: cannot open " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_metadata(buf.str());
}

ValidationReport validate_metadata(const MetadataEntry& m) {
  ValidationReport report;
  auto flag = [&](std::string path, std::string msg) {
    report.violations.push_back({std::move(path), std::move(msg)});
  };

  if (m.meta_id.empty()) {
    flag("meta_id", "meta_id must be non-empty");
  }
  if (!(m.duration_sec > 0.0)) {
    flag("duration_sec", "duration_sec must be positive");
  }

  // Per-shot script: ids strictly increasing, positive durations, total
  // within [duration_sec * (1 - slack), duration_sec].
  double script_total = 0.0;
  for (size_t i = 0; i < m.text.script.size(); ++i) {
    const auto& shot = m.text.script[i];
    if (i > 0 && shot.shot_id <= m.text.script[i - 1].shot_id) {
      flag("modality_details.text.script[" + std::to_string(i) + "].shot_id",
           "shot_ids not strictly increasing");
    }
    if (!(shot.duration_sec > 0.0)) {
      flag("modality_details.text.script[" + std::to_string(i) + "].duration_sec",
           "shot duration must be positive");
    }
    script_total += shot.duration_sec;
  }
  if (!m.text.script.empty() && m.duration_sec > 0.0) {
    constexpr double eps = 1e-9;
    if (script_total > m.duration_sec + eps) {
      flag("modality_details.text.script",
           "script durations exceed duration_sec (" + std::to_string(script_total) + " > " +
               std::to_string(m.duration_sec) + ")");
    } else if (script_total < m.duration_sec * (1.0 - kDurationSlackFraction) - eps) {
      flag("modality_details.text.script",
           "script durations undershoot duration_sec by more than " +
               std::to_string(int(kDurationSlackFraction * 100)) + "%");
    }
  }

  for (size_t i = 0; i < m.visual.shots.size(); ++i) {
    if (i > 0 && m.visual.shots[i].shot_id <= m.visual.shots[i - 1].shot_id) {
      flag("modality_details.visual.shots[" + std::to_string(i) + "].shot_id",
           "shot_ids not strictly increasing");
    }
  }

  return report;
}

CorpusValidation validate_corpus_dir(const std::filesystem::path& dir) {
  CorpusValidation out;
  std::set<std::string> seen_ids;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    try {
      MetadataEntry m = load_metadata_file(path);
      ValidationReport r = validate_metadata(m);
      for (auto& v : r.violations) {
        out.issues.emplace_back(path.string(), v);
      }
      if (!seen_ids.insert(m.meta_id).second) {
        out.issues.emplace_back(path.string(),
                                Violation{"meta_id", "duplicate meta_id '" + m.meta_id + "'"});
      }
      out.entries.push_back(std::move(m));
    } catch (const MetadataParseError& e) {
      out.issues.emplace_back(path.string(), Violation{"$", e.what()});
    }
  }
  return out;
}

}  // namespace vidiag::corpus
