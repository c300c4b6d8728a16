#pragma once

#include "portsym/classifier.hpp"
#include "portsym/kde.hpp"
#include "portsym/partition.hpp"

#include <optional>

namespace portsym {

/// A named density over a masked subset of egocentric variables.
struct Symbol {
  int id = 0;
  std::string name;
  std::vector<Index> mask;
  GaussianKde density;
  /// Lowest log-density the density assigns to its own training points.
  double min_train_log_density = 0.0;

  Vector project(const Eigen::Ref<const Vector>& full) const;
  double log_density(const Eigen::Ref<const Vector>& full) const { return density.log_density(project(full)); }
  /// Overwrites the masked entries of `full` with a draw from the density.
  void apply_sample(Vector& full, Rng& rng) const;
};

class Vocabulary {
 public:
  int add(Symbol s);
  const Symbol& at(int id) const;
  const std::vector<Symbol>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  std::vector<Symbol>& mutable_symbols() { return symbols_; }

 private:
  std::vector<Symbol> symbols_;
};

enum class NegativeSource {
  /// Failed initiations of the option plus starts of its other partitions.
  FailedInitiations,
  /// Starts of other options' successful executions plus starts of the option's other partitions.
  OtherOptionStarts,
};

struct SymbolParams {
  /// Per-variable sensor noise; the mask threshold is this times `mask_factor`.
  Vector noise;
  double mask_factor = 3.0;
  double bandwidth_floor = 1e-3;
  std::size_t max_centers = 400;
  std::size_t min_samples = 5;
  double discard_threshold = 0.05;
  double similarity_threshold = 0.1;
  std::size_t similarity_samples = 2000;
  std::size_t min_class_samples = 10;
  SvmParams svm;
  NegativeSource negatives = NegativeSource::FailedInitiations;
  std::uint64_t seed = 0;
};

/// Conjunction of disjunctions over symbol ids.
using SymbolicCondition = std::vector<std::vector<int>>;

struct PreconditionModel {
  ProbabilisticClassifier classifier;
  SymbolicCondition symbolic;
};

struct Outcome {
  double probability = 1.0;
  std::vector<int> effects;
};

/// Lifted rule for one egocentric partition of an option.
struct PortableRule {
  OptionId option_id = 0;
  int partition = 0;
  std::string option_name;
  PreconditionModel precondition;
  std::vector<Outcome> outcomes;
};

/// Variables whose mean absolute change exceeds max(factor * noise, 1e-9).
std::vector<Index> effect_mask(const Matrix& starts, const Matrix& ends, const Vector& noise, double factor);

ProbabilisticClassifier fit_precondition(const Matrix& positives, const Matrix& negatives, const SymbolParams& params);

Symbol fit_effect(const Matrix& ends, const std::vector<Index>& mask, const SymbolParams& params);
Symbol fit_effect(const Matrix& starts, const Matrix& ends, const SymbolParams& params);

/// Normalised L2 distance  int (p-q)^2 / (int p^2 + int q^2), Monte-Carlo estimate.
double density_distance(const GaussianKde& p, const GaussianKde& q, std::size_t samples, std::uint64_t seed);

/// Unifies symbols with equal masks whose distance is below the threshold.
/// Returns the old-id to new-id map; surviving symbols are renumbered densely.
std::vector<int> dedupe(Vocabulary& vocab, const SymbolParams& params);

/// Rewrites symbol references in rules through `remap`.
void remap_symbols(std::vector<PortableRule>& rules, const std::vector<int>& remap);

/// One rule per egocentric partition. Effect symbols are appended to `vocab`.
std::vector<PortableRule> build_portable_rules(const Dataset& ds, const std::vector<Partition>& partitions,
                                               Vocabulary& vocab, const SymbolParams& params);

/// Symbols whose samples, overlaid on `starts`, score at least 0.5 under the
/// classifier, grouped into one disjunctive clause per mask.
SymbolicCondition symbolic_precondition(const ProbabilisticClassifier& classifier, const Matrix& starts,
                                        const Vocabulary& vocab, std::uint64_t seed);

struct LearnParams {
  PartitionParams partition;
  SymbolParams symbols;
  bool symbolic_preconditions = true;
  /// Indexed by option id; used for readable rule names.
  std::vector<std::string> option_names;
};

/// Portable vocabulary and rules, plus the egocentric experience they were learned from.
struct PortableModel {
  std::string family;
  Index obs_dim = 0;
  Vector obs_noise;
  Vocabulary vocabulary;
  std::vector<PortableRule> rules;
  Dataset experience;

  const PortableRule* find_rule(OptionId option, int partition) const;
};

PortableModel learn_portable(const Dataset& ds, const LearnParams& params);

}  // namespace portsym
