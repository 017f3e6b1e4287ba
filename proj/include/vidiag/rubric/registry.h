#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vidiag/config.h"

namespace vidiag::rubric {

struct RegistryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Declares when a judge ordinal contradicts a tool signal: the rule fires
/// when the ordinal falls inside [ordinal_at_least, ordinal_at_most] and the
/// signal value lies outside the consistent range.
struct ContradictionRule {
  std::string signal;
  int ordinal_at_least = 1;
  int ordinal_at_most = 5;
  std::optional<double> consistent_min;
  std::optional<double> consistent_max;
};

struct Checkpoint {
  std::string id;
  std::string sub_metric;
  std::string dimension;
  std::string predicate;  // conjunction of attribute names, or "true"
  double weight = 1.0;
  std::array<std::string, 5> anchors;  // levels 1..5
  std::vector<std::string> required_tools;
  std::vector<ContradictionRule> contradictions;
};

struct Registry {
  std::vector<Checkpoint> checkpoints;
  std::vector<std::string> signals;

  const Checkpoint* find(const std::string& id) const;
};

/// The 40 checkpoint ids in registry order.
const std::vector<std::string>& canonical_checkpoint_ids();
/// The 9 sub-metrics in registry order.
const std::vector<std::string>& canonical_sub_metrics();
/// The 5 dimensions in reporting order.
const std::vector<std::string>& canonical_dimensions();
/// dimension owning a sub-metric; throws RegistryError for unknown names.
const std::string& dimension_of_sub_metric(const std::string& sub_metric);

/// Attribute names the predicate mini-language may reference (content
/// profile booleans plus the two activation hints).
const std::vector<std::string>& predicate_attribute_names();
/// Tool names the availability calibration may require.
const std::vector<std::string>& known_tool_names();

Registry parse_registry(const std::string& json_text);
/// Structural audit: cardinalities, id set, sub-metric sizes, dimension
/// mapping, anchors, weights, predicate and tool-name vocabulary.
void audit_registry(const Registry& registry);

/// The compiled-in registry (audited once at first use).
const Registry& builtin_registry();
/// registry_path override when set, else a copy of the builtin.
Registry load_registry(const EngineConfig& config);

struct HardConstraintRule {
  std::string id;
  std::string checkpoint_id;
  double violation_threshold = 0.5;
};

std::vector<HardConstraintRule> parse_constraints(const std::string& json_text);
const std::vector<HardConstraintRule>& builtin_constraints();
std::vector<HardConstraintRule> load_constraints(const EngineConfig& config);

}  // namespace vidiag::rubric
