#pragma once

#include "portsym/ground.hpp"

namespace portsym {

struct PpddlOutcome {
  double probability = 1.0;
  std::vector<std::string> add;
  std::vector<std::string> del;
  std::optional<int> assign_partition;
  bool operator==(const PpddlOutcome&) const = default;
};

struct PpddlAction {
  std::string name;
  /// Conjunction of disjunctions of predicate names, `notfailed` excluded.
  std::vector<std::vector<std::string>> precondition;
  std::optional<int> partition;
  std::vector<PpddlOutcome> outcomes;
  bool operator==(const PpddlAction&) const = default;
};

struct PpddlDomain {
  std::string name;
  std::vector<std::string> predicates;
  bool partition_function = false;
  std::vector<PpddlAction> actions;
  bool operator==(const PpddlDomain&) const = default;
};

/// One action per grounded operator, guarded and updated through the `partition` fluent.
PpddlDomain to_ppddl(const GroundedModel& gm, const std::string& name = "portable");
/// One lifted action per portable rule, with the rule's outcome probabilities.
PpddlDomain to_ppddl(const PortableModel& model, const std::string& name = "portable");

std::string emit_ppddl(const PpddlDomain& domain);
std::string emit_ppddl(const GroundedModel& gm, const std::string& name = "portable");
std::string emit_ppddl(const PortableModel& model, const std::string& name = "portable");

/// Accepts the emitted subset; errors carry line, column and the expected token.
PpddlDomain parse_ppddl(const std::string& text);

}  // namespace portsym
