#pragma once

#include "portsym/symbols.hpp"

#include <map>
#include <memory>
#include <tuple>

namespace portsym {

/// Problem-space partition labels of one task: dense integers in centroid order.
struct LabelSet {
  RangeScaling scaling;
  double eps = 0.02;
  /// Representative scaled points and their labels.
  Matrix points;
  std::vector<int> point_label;
  /// Start-state density of each label, in raw problem-space units.
  std::vector<GaussianKde> densities;
  /// Every state maps to label 0 when set.
  bool trivial = false;

  int size() const { return int(densities.size()); }
  /// Label of the nearest representative within eps, or -1.
  int assign(const Eigen::Ref<const Vector>& state) const;
};

struct LabelResult {
  LabelSet labels;
  /// Per transition; end_label equals start_label for failed executions.
  std::vector<int> start_label;
  std::vector<int> end_label;
};

struct GroundParams {
  PartitionParams partition{0.02, 1, 0.1, NoisePolicy::AttachNearest, 300};
  /// Log-density slack below a symbol's training minimum still matched to it.
  double outcome_margin = 10.0;
  std::size_t max_label_points = 64;
  std::size_t goal_samples = 256;
  SvmParams goal_svm;
  std::uint64_t seed = 0;
};

LabelResult label_problem_partitions(const Dataset& ds, const GroundParams& params);

struct LinkingEntry {
  int end_label = 0;
  int outcome = 0;
  double probability = 0.0;
  bool operator==(const LinkingEntry&) const = default;
};

/// Count-based map (option, egocentric partition, start label) -> joint
/// distribution over (end label, rule outcome).
struct LinkingFunction {
  using Key = std::tuple<OptionId, int, int>;
  std::map<Key, std::vector<LinkingEntry>> rows;
  std::map<Key, std::size_t> counts;

  /// Marginal over end labels of one row.
  std::map<int, double> end_distribution(const Key& key) const;
};

/// Egocentric partition of the option's rules that best explains `obs`, or -1.
int classify_partition(const PortableModel& model, OptionId option, const Eigen::Ref<const Vector>& obs);
/// Outcome of `rule` whose effect best explains `next_obs`, or -1 when none is within the margin.
int match_outcome(const PortableModel& model, const PortableRule& rule, const Eigen::Ref<const Vector>& next_obs,
                  double margin);

LinkingFunction learn_linking(const Dataset& ds, const LabelResult& labels, const PortableModel& model,
                              const GroundParams& params = {});

/// Problem-space states labelled in or out of the goal set.
struct GoalSamples {
  Matrix states;
  std::vector<bool> in_goal;
};

struct GroundedOperator {
  OptionId option_id = 0;
  int partition = 0;
  int start_label = 0;
  std::vector<LinkingEntry> outcomes;
  bool operator==(const GroundedOperator&) const = default;
};

struct GroundedModel {
  std::shared_ptr<const PortableModel> portable;
  LabelSet labels;
  LinkingFunction linking;
  std::vector<GroundedOperator> operators;
  std::optional<ProbabilisticClassifier> goal;
  /// Mean goal-classifier score under each label's density.
  Vector label_goal_probability;
  std::vector<std::string> warnings;

  const GroundedOperator* find(OptionId option, int partition, int label) const;
  void index();

 private:
  std::map<LinkingFunction::Key, std::size_t> lookup_;
};

/// One operator per (rule, start label) with a linking row.
GroundedModel ground_rules(std::shared_ptr<const PortableModel> model, const LinkingFunction& linking,
                           LabelSet labels, const GoalSamples* goals, const GroundParams& params = {},
                           const Dataset* task_data = nullptr, const LabelResult* label_result = nullptr);

/// Fits the goal classifier and each label's goal probability; no-op without goals.
void fit_goal(GroundedModel& gm, const GoalSamples* goals, const GroundParams& params = {});

/// Labels, linking and grounding from one task's data.
GroundedModel ground(std::shared_ptr<const PortableModel> model, const Dataset& task_data, const GoalSamples* goals,
                     const GroundParams& params = {});

/// Grounding for a model learned directly in problem space: one label, with
/// each rule's outcomes as its only linking row.
GroundedModel ground_trivially(std::shared_ptr<const PortableModel> model, const GoalSamples* goals = nullptr,
                               const GroundParams& params = {});

/// The dataset with each observation replaced by its problem-space state.
Dataset problem_space_view(const Dataset& ds);

/// Goal classifier score averaged over draws from each label's density.
Vector label_goal_probabilities(const LabelSet& labels, const ProbabilisticClassifier& goal, std::size_t samples,
                                std::uint64_t seed);

}  // namespace portsym
