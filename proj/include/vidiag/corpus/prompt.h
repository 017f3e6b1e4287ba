#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "vidiag/config.h"
#include "vidiag/corpus/types.h"

namespace vidiag::corpus {

/// One jargon registry entry: a term, the minimum expertise level allowed
/// to use it, and the plain-language replacement used below that level.
struct JargonTerm {
  std::string term;         // canonical form, underscores for spaces
  ExpertiseLevel min_level = ExpertiseLevel::professional;
  std::string plain;        // substitute wording
};

const std::vector<JargonTerm>& jargon_registry();

/// Replaces every registry term above `level` with its plain alternative.
std::string apply_register(const std::string& text, ExpertiseLevel level);

/// Gate identifiers, in report order.
inline constexpr std::array<const char*, 9> kGateIds = {
    "clear_task_statement",  // g1
    "dimensions_present",    // g2
    "directive_prose",       // g3
    "char_limit",            // g4
    "expertise_register",    // g5
    "opening_intent",        // g6
    "priority_order",        // g7
    "metadata_consistency",  // g8
    "duplicate_ratio",       // g9
};

/// Runs the nine rejection criteria over a prompt text. Always returns
/// exactly nine verdicts, for any input including empty and oversized.
std::vector<GateVerdict> check_prompt_gates(const std::string& prompt_text,
                                            const MetadataEntry& m, const UserProfile& u,
                                            const EngineConfig& config = {});

// ---- text inspection helpers (shared by the gates, the template backend
// ---- and the test suite)

/// Splits into trimmed sentences on . ! ? boundaries.
std::vector<std::string> split_sentences(const std::string& text);

/// Lowercased word tokens; runs of [A-Za-z0-9_-].
std::vector<std::string> tokenize(const std::string& text);

/// Shot ids referenced as "shot <n>" (and "shots <n>").
std::set<int> referenced_shot_ids(const std::string& text);

/// The set of dimension-vocabulary keywords present (prefix-of-token match).
std::set<std::string> dimension_keyword_set(const std::string& text);

/// Sentences attributed to each dimension (story, visual, audio, sync) by
/// keyword presence. A sentence may count for several dimensions.
std::array<int, 4> dimension_sentence_counts(const std::string& text);

// ---- prompt generation

struct PromptBackendError : std::runtime_error {
  std::string backend_trace;
  PromptBackendError(const std::string& what, std::string trace)
      : std::runtime_error(what), backend_trace(std::move(trace)) {}
};

struct PromptRejected : std::runtime_error {
  std::vector<GateVerdict> gate_report;
  PromptRejected(const std::string& what, std::vector<GateVerdict> report)
      : std::runtime_error(what), gate_report(std::move(report)) {}
};

class PromptBackend {
 public:
  virtual ~PromptBackend() = default;
  virtual std::string name() const = 0;
  /// Produces a candidate prompt text; throws PromptBackendError on failure.
  virtual std::string generate(const MetadataEntry& m, const UserProfile& u,
                               uint64_t seed) = 0;
};

/// Deterministic template backend: a pure function of (m, u, seed).
/// Identical inputs yield byte-identical prompts.
class TemplatePromptBackend : public PromptBackend {
 public:
  explicit TemplatePromptBackend(EngineConfig config = {}) : config_(std::move(config)) {}
  std::string name() const override { return "template"; }
  std::string generate(const MetadataEntry& m, const UserProfile& u, uint64_t seed) override;

 private:
  EngineConfig config_;
};

/// Language-model adapter speaking JSON over HTTP. POSTs the metadata,
/// profile and seed to <url>/generate and expects {"text": "..."}.
class RemotePromptBackend : public PromptBackend {
 public:
  explicit RemotePromptBackend(EngineConfig config) : config_(std::move(config)) {}
  std::string name() const override { return "remote"; }
  std::string generate(const MetadataEntry& m, const UserProfile& u, uint64_t seed) override;

 private:
  EngineConfig config_;
};

/// Generates a prompt and populates its gate report, retrying with bumped
/// seeds up to config.prompt_max_retries. Throws PromptRejected when no
/// attempt passes all nine gates.
PersonalizedPrompt generate_prompt(const MetadataEntry& m, const UserProfile& u,
                                   PromptBackend& backend, const EngineConfig& config = {},
                                   uint64_t seed = 0);

}  // namespace vidiag::corpus
