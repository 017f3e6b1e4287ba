#include "vidiag/corpus/prompt.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "vidiag/hash.h"
#include "json.hpp"

namespace vidiag::corpus {
namespace {

using json = nlohmann::json;

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Dimension keyword vocabulary. A token counts for a dimension when one of
// these keywords is a prefix of the token.
const std::array<std::vector<std::string>, 4> kDimVocab = {{
    {"story", "plot", "narrative", "storyline"},
    {"visual", "camera", "lighting"},
    {"audio", "music", "sound"},
    {"sync", "align", "timing"},
}};

const std::vector<std::string> kCreationVerbs = {"create", "generate", "produce",
                                                 "make",   "film",     "shoot"};
const std::vector<std::string> kMediaNouns = {"video", "film", "clip", "movie"};

const std::vector<std::string> kImperativeVerbs = {
    "create", "generate", "produce", "make",    "film",    "shoot",   "shape",
    "plan",   "cover",    "keep",    "score",   "use",     "let",     "sync",
    "align",  "treat",    "maintain", "watch",  "mix",     "give",    "hold",
    "end",    "balance",  "open",    "close",   "start",   "begin",   "show",
    "add",    "include",  "ensure",  "match",   "follow",  "set",     "pace",
    "blend",  "frame",    "capture", "feature", "structure", "write", "describe",
    "place",  "lean",     "avoid",   "stay",    "bring",   "deliver", "present",
    "wrap",   "anchor",   "tie",     "drive",   "build",   "carry",   "vary",
    "check",  "respect",  "honor"};

const std::vector<std::string> kLeadingFillers = {"please", "also", "then",
                                                  "and",    "finally", "next", "now"};

const std::vector<std::string> kTopicStopwords = {
    "that",  "this",   "with",     "from",     "over",  "into",   "about",
    "where", "which",  "while",    "after",    "before", "should", "would",
    "their", "them",   "then",     "than",     "have",  "will",   "make",
    "create", "generate", "produce", "featuring", "complete", "include",
    "using", "your",   "each",     "every"};

bool token_has_prefix(const std::string& token, const std::vector<std::string>& kws) {
  for (const auto& kw : kws)
    if (token.rfind(kw, 0) == 0) return true;
  return false;
}

bool contains_token(const std::vector<std::string>& tokens, const std::string& t) {
  return std::find(tokens.begin(), tokens.end(), t) != tokens.end();
}

std::string first_meaningful_token(const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) {
    if (std::find(kLeadingFillers.begin(), kLeadingFillers.end(), t) !=
        kLeadingFillers.end())
      continue;
    return t;
  }
  return "";
}

bool is_imperative(const std::string& sentence) {
  auto tokens = tokenize(sentence);
  auto head = first_meaningful_token(tokens);
  return std::find(kImperativeVerbs.begin(), kImperativeVerbs.end(), head) !=
         kImperativeVerbs.end();
}

std::vector<std::string> term_variants(const std::string& term) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : term) {
    if (c == '_' || c == '-' || c == ' ') {
      if (!cur.empty()) words.push_back(cur);
      cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (!cur.empty()) words.push_back(cur);
  if (words.size() == 1) return {words[0]};
  std::vector<std::string> out;
  for (const char* sep : {"_", "-", " "}) {
    std::string v;
    for (size_t i = 0; i < words.size(); ++i) {
      if (i) v += sep;
      v += words[i];
    }
    out.push_back(v);
  }
  return out;
}

// Finds `needle` in `hay_lower` at a token boundary starting at or after pos.
size_t find_bounded(const std::string& hay_lower, const std::string& needle, size_t pos) {
  while (true) {
    size_t at = hay_lower.find(needle, pos);
    if (at == std::string::npos) return std::string::npos;
    bool left_ok = at == 0 || !is_word_char(hay_lower[at - 1]);
    size_t end = at + needle.size();
    bool right_ok = end >= hay_lower.size() || !is_word_char(hay_lower[end]);
    if (left_ok && right_ok) return at;
    pos = at + 1;
  }
}

ExpertiseLevel level_from_string(const std::string& s) {
  if (s == "novice") return ExpertiseLevel::novice;
  if (s == "intermediate") return ExpertiseLevel::intermediate;
  if (s == "professional") return ExpertiseLevel::professional;
  throw std::runtime_error("unknown expertise level: " + s);
}

std::vector<JargonTerm> load_jargon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open jargon registry: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str());
  std::vector<JargonTerm> out;
  for (const auto& e : j) {
    JargonTerm t;
    t.term = e.at("term").get<std::string>();
    t.min_level = level_from_string(e.at("level").get<std::string>());
    t.plain = e.at("plain").get<std::string>();
    out.push_back(std::move(t));
  }
  return out;
}

const std::vector<JargonTerm>& registry_for(const EngineConfig& config) {
  if (config.jargon_path.empty()) return jargon_registry();
  static std::mutex mu;
  static std::map<std::string, std::vector<JargonTerm>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(config.jargon_path);
  if (it == cache.end())
    it = cache.emplace(config.jargon_path, load_jargon_file(config.jargon_path)).first;
  return it->second;
}

/// Terms in `text` whose minimum level exceeds `level`.
std::vector<std::string> terms_above_level(const std::string& text, ExpertiseLevel level,
                                           const std::vector<JargonTerm>& registry) {
  std::vector<std::string> found;
  std::string hay = lower(text);
  for (const auto& jt : registry) {
    if (static_cast<int>(jt.min_level) <= static_cast<int>(level)) continue;
    for (const auto& v : term_variants(jt.term)) {
      if (find_bounded(hay, v, 0) != std::string::npos) {
        found.push_back(jt.term);
        break;
      }
    }
  }
  return found;
}

std::string replace_terms(const std::string& text, ExpertiseLevel level,
                          const std::vector<JargonTerm>& registry) {
  std::string out = text;
  for (const auto& jt : registry) {
    if (static_cast<int>(jt.min_level) <= static_cast<int>(level)) continue;
    for (const auto& v : term_variants(jt.term)) {
      while (true) {
        size_t at = find_bounded(lower(out), v, 0);
        if (at == std::string::npos) break;
        std::string plain = jt.plain;
        if (std::isupper(static_cast<unsigned char>(out[at])) && !plain.empty())
          plain[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(plain[0])));
        out = out.substr(0, at) + plain + out.substr(at + v.size());
      }
    }
  }
  return out;
}

std::string normalize_sentence(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (!out.empty() && out.back() != ' ')
      out += ' ';
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

/// Total-duration figures asserted by the text: "<n>-second ... video" with
/// the media noun within the next two tokens, or "<n> seconds" followed
/// closely by total/overall/long/altogether.
std::vector<double> claimed_total_durations(const std::vector<std::string>& tokens) {
  std::vector<double> out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    size_t dash = t.rfind("-second");
    if (dash != std::string::npos && dash + 7 == t.size()) {
      double num;
      if (parse_number(t.substr(0, dash), num)) {
        for (size_t j = i + 1; j < std::min(tokens.size(), i + 3); ++j) {
          if (token_has_prefix(tokens[j], kMediaNouns)) {
            out.push_back(num);
            break;
          }
        }
      }
      continue;
    }
    if (t == "seconds" && i > 0) {
      double num;
      if (!parse_number(tokens[i - 1], num)) continue;
      for (size_t j = i + 1; j < std::min(tokens.size(), i + 3); ++j) {
        if (tokens[j] == "total" || tokens[j] == "overall" || tokens[j] == "long" ||
            tokens[j] == "altogether") {
          out.push_back(num);
          break;
        }
      }
    }
  }
  return out;
}

bool contains_phrase(const std::string& hay_lower, const std::vector<std::string>& phrases) {
  for (const auto& p : phrases)
    if (find_bounded(hay_lower, p, 0) != std::string::npos) return true;
  return false;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

const std::vector<JargonTerm>& jargon_registry() {
  static const std::vector<JargonTerm> kRegistry = {
      {"push_in", ExpertiseLevel::professional, "slow zoom-in"},
      {"color temperature", ExpertiseLevel::professional, "warmth of the colors"},
      {"three-act", ExpertiseLevel::intermediate, "beginning-middle-end"},
      {"tracking shot", ExpertiseLevel::intermediate, "following shot"},
      {"orbiting", ExpertiseLevel::professional, "circling around"},
      {"rack focus", ExpertiseLevel::professional, "shift of focus"},
      {"match cut", ExpertiseLevel::professional, "seamless cut"},
      {"diegetic", ExpertiseLevel::professional, "in-scene"},
      {"j-cut", ExpertiseLevel::professional, "early audio lead-in"},
      {"mise-en-scene", ExpertiseLevel::professional, "scene arrangement"},
      {"rack_focus", ExpertiseLevel::professional, "shift of focus"},
      {"whip pan", ExpertiseLevel::professional, "fast sweep"},
      {"dolly", ExpertiseLevel::intermediate, "rolling camera move"},
  };
  return kRegistry;
}

std::string apply_register(const std::string& text, ExpertiseLevel level) {
  return replace_terms(text, level, jargon_registry());
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool boundary = (c == '.' || c == '!' || c == '?');
    if (c == '.' && i > 0 && i + 1 < text.size() &&
        std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
        std::isdigit(static_cast<unsigned char>(text[i + 1])))
      boundary = false;  // decimal point
    if (boundary) {
      size_t a = cur.find_first_not_of(" \t\n\r");
      if (a != std::string::npos) {
        size_t b = cur.find_last_not_of(" \t\n\r");
        out.push_back(cur.substr(a, b - a + 1));
      }
      cur.clear();
    } else {
      cur += c;
    }
  }
  size_t a = cur.find_first_not_of(" \t\n\r");
  if (a != std::string::npos) {
    size_t b = cur.find_last_not_of(" \t\n\r");
    out.push_back(cur.substr(a, b - a + 1));
  }
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (is_word_char(c)) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::set<int> referenced_shot_ids(const std::string& text) {
  std::set<int> out;
  auto tokens = tokenize(text);
  for (size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i] != "shot" && tokens[i] != "shots") continue;
    const std::string& next = tokens[i + 1];
    if (!next.empty() &&
        std::all_of(next.begin(), next.end(),
                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      out.insert(std::stoi(next));
  }
  return out;
}

std::set<std::string> dimension_keyword_set(const std::string& text) {
  std::set<std::string> out;
  auto tokens = tokenize(text);
  for (const auto& vocab : kDimVocab)
    for (const auto& kw : vocab)
      for (const auto& t : tokens)
        if (t.rfind(kw, 0) == 0) {
          out.insert(kw);
          break;
        }
  return out;
}

std::array<int, 4> dimension_sentence_counts(const std::string& text) {
  std::array<int, 4> counts = {0, 0, 0, 0};
  for (const auto& sentence : split_sentences(text)) {
    auto tokens = tokenize(sentence);
    for (int d = 0; d < 4; ++d) {
      bool hit = false;
      for (const auto& t : tokens)
        if (token_has_prefix(t, kDimVocab[d])) {
          hit = true;
          break;
        }
      if (hit) counts[d]++;
    }
  }
  return counts;
}

std::vector<GateVerdict> check_prompt_gates(const std::string& prompt_text,
                                            const MetadataEntry& m, const UserProfile& u,
                                            const EngineConfig& config) {
  std::vector<GateVerdict> report;
  auto add = [&](int idx, bool passed, std::string note) {
    report.push_back({kGateIds[idx], passed, std::move(note)});
  };

  auto sentences = split_sentences(prompt_text);
  auto all_tokens = tokenize(prompt_text);
  std::string hay = lower(prompt_text);

  // g1: some sentence states a creation task over a media artifact.
  bool g1 = false;
  for (const auto& s : sentences) {
    auto toks = tokenize(s);
    bool verb = false, noun = false;
    for (const auto& t : toks) {
      if (contains_token(kCreationVerbs, t) || (t.rfind("creat", 0) == 0)) verb = true;
      if (token_has_prefix(t, kMediaNouns)) noun = true;
    }
    if (verb && noun) {
      g1 = true;
      break;
    }
  }
  add(0, g1, g1 ? "" : "no sentence pairs a creation verb with a media noun");

  // g2: every scoring dimension is mentioned at least once.
  std::vector<std::string> missing_dims;
  static const char* kDimNames[4] = {"story", "visual", "audio", "sync"};
  for (int d = 0; d < 4; ++d) {
    bool hit = false;
    for (const auto& t : all_tokens)
      if (token_has_prefix(t, kDimVocab[d])) {
        hit = true;
        break;
      }
    if (!hit) missing_dims.push_back(kDimNames[d]);
  }
  add(1, missing_dims.empty(),
      missing_dims.empty() ? "" : "missing dimensions: " + join(missing_dims, ", "));

  // g3: the text reads as direction, not an essay.
  int imperative = 0;
  for (const auto& s : sentences)
    if (is_imperative(s)) imperative++;
  bool g3 = !sentences.empty() &&
            static_cast<double>(imperative) > 0.5 * static_cast<double>(sentences.size());
  char g3buf[96];
  std::snprintf(g3buf, sizeof(g3buf), "%d of %zu sentences imperative", imperative,
                sentences.size());
  add(2, g3, g3 ? "" : g3buf);

  // g4: hard character budget.
  bool g4 = prompt_text.size() <= static_cast<size_t>(config.char_limit);
  char g4buf[96];
  std::snprintf(g4buf, sizeof(g4buf), "%zu chars exceeds limit %d", prompt_text.size(),
                config.char_limit);
  add(3, g4, g4 ? "" : g4buf);

  // g5: no vocabulary above the profile's expertise level.
  auto above = terms_above_level(prompt_text, u.expertise_level, registry_for(config));
  add(4, above.empty(),
      above.empty() ? "" : "terms above expertise level: " + join(above, ", "));

  // g6: the first sentence carries the brief's topic.
  bool g6 = false;
  std::string g6_note = "empty prompt";
  if (!sentences.empty()) {
    std::set<std::string> topic;
    for (const std::string& source :
         {m.main_instruction, apply_register(m.main_instruction, ExpertiseLevel::novice)}) {
      for (const auto& t : tokenize(source)) {
        if (t.size() < 4) continue;
        if (contains_token(kTopicStopwords, t)) continue;
        if (std::all_of(t.begin(), t.end(),
                        [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
          continue;
        topic.insert(t);
      }
    }
    if (topic.empty()) {
      g6 = true;  // nothing to anchor on; vacuously satisfied
      g6_note = "";
    } else {
      for (const auto& t : tokenize(sentences.front()))
        if (topic.count(t)) {
          g6 = true;
          break;
        }
      g6_note = g6 ? "" : "first sentence shares no topic words with the brief";
    }
  }
  add(5, g6, g6_note);

  // g7: no lower-weighted dimension gets more sentences than the top one.
  auto counts = dimension_sentence_counts(prompt_text);
  double max_w = std::max(std::max(u.weights.story, u.weights.visual),
                          std::max(u.weights.audio, u.weights.sync));
  int top_count = 0;
  for (int d = 0; d < 4; ++d)
    if (u.weights[d] >= max_w - 1e-12) top_count = std::max(top_count, counts[d]);
  bool g7 = true;
  std::string g7_note;
  for (int d = 0; d < 4; ++d) {
    if (u.weights[d] < max_w - 1e-12 && counts[d] > top_count) {
      g7 = false;
      g7_note = std::string(kDimNames[d]) + " outweighs the top-priority dimension";
      break;
    }
  }
  add(6, g7, g7_note);

  // g8: nothing contradicts the metadata.
  bool g8 = true;
  std::string g8_note;
  for (double claimed : claimed_total_durations(all_tokens)) {
    if (std::fabs(claimed - m.duration_sec) > 0.25) {
      g8 = false;
      char buf[96];
      std::snprintf(buf, sizeof(buf), "claims %.6g seconds, metadata says %.6g", claimed,
                    m.duration_sec);
      g8_note = buf;
      break;
    }
  }
  if (g8) {
    static const std::vector<std::string> kDialogueNegations = {
        "no dialogue",    "without dialogue", "without any dialogue", "dialogue-free",
        "silent video",   "no spoken",        "without spoken"};
    static const std::vector<std::string> kDialogueDemands = {
        "with dialogue", "spoken dialogue", "include dialogue", "audible dialogue",
        "lip-sync",      "lip sync",        "lip_sync",         "spoken lines"};
    if (m.audio.dialogue && contains_phrase(hay, kDialogueNegations)) {
      g8 = false;
      g8_note = "denies dialogue although the metadata includes it";
    } else if (!m.audio.dialogue && contains_phrase(hay, kDialogueDemands)) {
      g8 = false;
      g8_note = "demands dialogue although the metadata has none";
    }
  }
  add(7, g8, g8_note);

  // g9: duplicated sentences beyond 30%.
  bool g9 = true;
  std::string g9_note;
  if (!sentences.empty()) {
    std::set<std::string> distinct;
    for (const auto& s : sentences) distinct.insert(normalize_sentence(s));
    double ratio = static_cast<double>(sentences.size() - distinct.size()) /
                   static_cast<double>(sentences.size());
    if (ratio > 0.30) {
      g9 = false;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "duplicate sentence ratio %.2f", ratio);
      g9_note = buf;
    }
  }
  add(8, g9, g9_note);

  return report;
}

// ---------------------------------------------------------------------------
// Template backend

namespace {

struct Rand {
  uint64_t state;
  explicit Rand(uint64_t s) : state(fnv1a_u64(s, fnv1a("template-prompt"))) {}
  size_t pick(size_t n) {
    state = fnv1a_u64(state ^ 0x9e3779b97f4a7c15ULL);
    return n == 0 ? 0 : static_cast<size_t>(state % n);
  }
};

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string de_underscore(std::string s) {
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

std::string truncate_words(const std::string& s, size_t limit) {
  if (s.size() <= limit) return s;
  size_t cut = s.find_last_of(' ', limit);
  if (cut == std::string::npos || cut == 0) cut = limit;
  std::string out = s.substr(0, cut);
  while (!out.empty() && (out.back() == ' ' || out.back() == ',')) out.pop_back();
  return out;
}

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

std::string display_type(VideoType t) {
  switch (t) {
    case VideoType::daily_life: return "daily-life";
    case VideoType::scifi: return "sci-fi";
    default: return to_string(t);
  }
}

/// main_instruction with any leading creation verb stripped, ready to sit
/// after "video about".
std::string instruction_body(const std::string& instruction) {
  std::string body = instruction;
  while (!body.empty() && (body.back() == '.' || body.back() == ' ')) body.pop_back();
  auto tokens = tokenize(body);
  if (!tokens.empty() && contains_token(kCreationVerbs, tokens.front())) {
    size_t cut = body.find(' ');
    if (cut != std::string::npos) body = body.substr(cut + 1);
  }
  return lower_first(body);
}

struct Block {
  int dim;  // 0 story, 1 visual, 2 audio, 3 sync
  double weight;
  std::vector<std::string> core;
  std::vector<std::string> elab;
};

const std::array<std::vector<std::string>, 4> kElabBank = {{
    {"Let the story breathe where the emotion peaks.",
     "Keep the plot causal so every beat earns the next.",
     "Give the story a clear emotional progression.",
     "Hold the story to a single point of view.",
     "End the plot on a real resolution, not a cliffhanger."},
    {"Treat the camera as a storyteller that moves only with purpose.",
     "Keep the lighting motivated by the scene, never decorative.",
     "Maintain continuity of characters and setting across camera setups.",
     "Use the camera movements requested in the brief and no others.",
     "Watch the color temperature so the lighting grade never jumps."},
    {"Mix the music under the voices, never over them.",
     "Let the sound design carry the atmosphere between moments.",
     "Give the audio an emotional arc that mirrors the picture.",
     "Keep the music restrained in the quiet passages.",
     "Balance the soundtrack so effects never bury the melody."},
    {"Sync effects to their on-screen sources exactly.",
     "Align the emotional peaks of image and score.",
     "Keep every cut aligned with the motion around it.",
     "Sync the final beat of picture and track on the last cut.",
     "Align the pacing of cuts with the rhythm underneath."},
}};

std::vector<std::string> story_core(const MetadataEntry& m) {
  std::vector<std::string> core;
  if (m.has_story_arc()) {
    core.push_back("Shape the story in three acts: " +
                   truncate_words(de_underscore(m.text.story_arc.act1_setup), 80) +
                   "; then " +
                   truncate_words(de_underscore(m.text.story_arc.act2_conflict), 80) +
                   "; finally " +
                   truncate_words(de_underscore(m.text.story_arc.act3_resolution), 80) + ".");
  } else {
    core.push_back("Shape the story as a simple progression with a clear beginning and end.");
  }
  if (!m.text.script.empty()) {
    std::vector<std::string> parts;
    for (const auto& shot : m.text.script)
      parts.push_back("shot " + std::to_string(shot.shot_id) + " (about " +
                      fmt_num(shot.duration_sec) + " seconds)");
    core.push_back("Plan the plot across " + join(parts, ", ") + ".");
  } else {
    core.push_back("Plan the plot as one continuous scene with no hard cuts.");
  }
  return core;
}

std::vector<std::string> visual_core(const MetadataEntry& m) {
  std::vector<std::string> core;
  if (!m.visual.shots.empty()) {
    std::vector<std::string> parts;
    for (const auto& shot : m.visual.shots) {
      std::string move = de_underscore(shot.camera_movement);
      std::string desc = truncate_words(de_underscore(shot.description), 60);
      if (move.empty())
        parts.push_back("shot " + std::to_string(shot.shot_id) + " holds on " + desc);
      else
        parts.push_back("shot " + std::to_string(shot.shot_id) + " uses " + move + " on " +
                        desc);
    }
    core.push_back("Cover the camera plan: " + join(parts, "; ") + ".");
  } else {
    core.push_back("Cover the camera work with simple, steady framing throughout.");
  }
  if (!m.visual.consistency_requirements.empty()) {
    std::vector<std::string> parts;
    for (const auto& r : m.visual.consistency_requirements)
      parts.push_back(truncate_words(de_underscore(r), 40));
    core.push_back("Keep the lighting and continuity consistent: " + join(parts, ", ") + ".");
  } else {
    core.push_back("Keep the lighting steady and deliberate from first shot to last.");
  }
  return core;
}

std::vector<std::string> audio_core(const MetadataEntry& m) {
  std::vector<std::string> core;
  std::string bgm = de_underscore(m.audio.bgm_style);
  if (!bgm.empty()) {
    std::string first = "Score the piece with " + truncate_words(bgm, 60) + " music";
    if (!m.audio.sound_effects.empty()) {
      std::vector<std::string> parts;
      for (const auto& s : m.audio.sound_effects)
        parts.push_back(truncate_words(de_underscore(s), 40));
      first += " and keep the sound effects grounded: " + join(parts, ", ");
    } else {
      first += " and let the sound design stay subtle";
    }
    core.push_back(first + ".");
  } else {
    core.push_back("Use music sparingly and keep the sound design intentional.");
  }
  std::string clause = m.audio.dialogue ? "with clearly audible spoken lines"
                                        : "without any spoken words";
  std::string tone = de_underscore(m.audio.tone_control);
  if (!tone.empty())
    core.push_back("Let the audio follow " + truncate_words(tone, 60) + ", " + clause + ".");
  else
    core.push_back("Keep the audio balanced, " + clause + ".");
  return core;
}

std::vector<std::string> sync_core(const MetadataEntry& m) {
  std::vector<std::string> core;
  core.push_back("Sync every transition with the track so cuts land cleanly.");
  if (m.audio.lip_sync && m.audio.dialogue)
    core.push_back("Align lip movement with the spoken lines precisely.");
  else
    core.push_back("Align scene changes with the beat so nothing drifts.");
  return core;
}

}  // namespace

std::string TemplatePromptBackend::generate(const MetadataEntry& m, const UserProfile& u,
                                            uint64_t seed) {
  Rand rng(fnv1a(m.meta_id + "|" + u.profile_id, fnv1a_u64(seed)));

  std::vector<std::string> opening_verbs;
  switch (u.expression_style) {
    case ExpressionStyle::conversational:
      opening_verbs = {"Please make", "Please create"};
      break;
    case ExpressionStyle::directive:
      opening_verbs = {"Create", "Produce"};
      break;
    case ExpressionStyle::technical:
      opening_verbs = {"Produce", "Generate"};
      break;
    case ExpressionStyle::expressive:
      opening_verbs = {"Create", "Make"};
      break;
  }
  std::string opening = opening_verbs[rng.pick(opening_verbs.size())] + " a " +
                        fmt_num(m.duration_sec) + "-second " + display_type(m.video_type) +
                        " video";
  std::string body = instruction_body(m.main_instruction);
  if (body.empty())
    opening += " that fits the brief below.";
  else
    opening += " about " + body + ".";

  std::vector<Block> blocks(4);
  blocks[0] = {0, u.weights.story, story_core(m), {}};
  blocks[1] = {1, u.weights.visual, visual_core(m), {}};
  blocks[2] = {2, u.weights.audio, audio_core(m), {}};
  blocks[3] = {3, u.weights.sync, sync_core(m), {}};
  for (auto& b : blocks) {
    int n = static_cast<int>(std::floor(b.weight * 10.0 + 1e-9));
    n = std::clamp(n, 0, static_cast<int>(kElabBank[b.dim].size()));
    for (int i = 0; i < n; ++i) b.elab.push_back(kElabBank[b.dim][i]);
  }

  std::vector<int> order = {0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return blocks[a].weight > blocks[b].weight + 1e-12;
  });

  auto render = [&]() {
    std::vector<std::string> sentences = {opening};
    for (int idx : order) {
      const Block& b = blocks[idx];
      sentences.insert(sentences.end(), b.core.begin(), b.core.end());
      sentences.insert(sentences.end(), b.elab.begin(), b.elab.end());
    }
    return apply_register(join(sentences, " "), u.expertise_level);
  };

  std::string text = render();
  while (text.size() > static_cast<size_t>(config_.char_limit)) {
    // Drop elaborations from the least-weighted dimensions first.
    int victim = -1;
    for (auto it = order.rbegin(); it != order.rend(); ++it)
      if (!blocks[*it].elab.empty()) {
        victim = *it;
        break;
      }
    if (victim < 0) break;
    blocks[victim].elab.pop_back();
    text = render();
  }
  return text;
}

PersonalizedPrompt generate_prompt(const MetadataEntry& m, const UserProfile& u,
                                   PromptBackend& backend, const EngineConfig& config,
                                   uint64_t seed) {
  int attempts = std::max(1, config.prompt_max_retries);
  std::vector<GateVerdict> last_report;
  std::string last_error;
  std::string last_trace;
  bool backend_failed = false;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::string text;
    try {
      text = backend.generate(m, u, seed + static_cast<uint64_t>(attempt));
    } catch (const PromptBackendError& e) {
      backend_failed = true;
      last_error = e.what();
      last_trace = e.backend_trace;
      continue;
    }
    auto report = check_prompt_gates(text, m, u, config);
    bool ok = std::all_of(report.begin(), report.end(),
                          [](const GateVerdict& g) { return g.passed; });
    if (ok) {
      PersonalizedPrompt p;
      char idbuf[32];
      std::snprintf(idbuf, sizeof(idbuf), "p_%016llx",
                    static_cast<unsigned long long>(fnv1a(
                        m.meta_id + "|" + u.profile_id + "|" + std::to_string(seed))));
      p.prompt_id = idbuf;
      p.meta_id = m.meta_id;
      p.profile_id = u.profile_id;
      p.text = text;
      p.char_count = static_cast<int>(text.size());
      p.gate_report = std::move(report);
      return p;
    }
    last_report = std::move(report);
  }
  if (backend_failed && last_report.empty())
    throw PromptBackendError(
        "prompt backend " + backend.name() + " failed after " + std::to_string(attempts) +
            " attempts: " + last_error,
        last_trace);
  std::vector<std::string> failed;
  for (const auto& g : last_report)
    if (!g.passed) failed.push_back(g.gate_id);
  throw PromptRejected("prompt rejected after " + std::to_string(attempts) +
                           " attempts; failing gates: " + join(failed, ", "),
                       std::move(last_report));
}

}  // namespace vidiag::corpus
