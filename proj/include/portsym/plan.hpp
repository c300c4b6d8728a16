#pragma once

#include "portsym/ground.hpp"

#include <functional>

namespace portsym {

/// Weighted particles over (egocentric vector, partition label).
struct BeliefState {
  std::vector<Vector> particles;
  std::vector<int> labels;
  Vector weights;

  std::size_t size() const { return particles.size(); }
  void normalize();
};

using StateSampler = std::function<Vector(Rng&)>;
using GoalPredicate = std::function<bool(const Vector&)>;

/// Particles from problem-space start states: each state is observed through a
/// copy of `env` and labelled by `labels`. With `problem_space` the particle
/// vector is the state itself.
BeliefState belief_from_states(const Environment& env, const StateSampler& sampler, const LabelSet& labels,
                               std::size_t count, std::uint64_t seed, bool problem_space = false);

struct PlanStep {
  OptionId option_id = 0;
  int partition = 0;
  bool operator==(const PlanStep&) const = default;
  auto operator<=>(const PlanStep&) const = default;
};

struct Plan {
  std::vector<PlanStep> steps;
  double probability = 0.0;
};

struct PlanParams {
  std::size_t particles = 256;
  std::uint64_t seed = 0;
};

/// The plan names a rule with no grounded operator at any label.
class MissingOperatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Product over steps of the weighted mean precondition score, propagating
/// particles through each step's linked outcomes; with `goal`, times the
/// probability that the final belief lies in the goal.
double plan_probability(const GroundedModel& gm, const BeliefState& Z, const std::vector<PlanStep>& plan, bool goal,
                        const PlanParams& params = {});

/// Probability of one step and the belief after it.
std::pair<double, BeliefState> propagate(const GroundedModel& gm, const BeliefState& Z, const PlanStep& step,
                                         Rng& rng, std::size_t particles);

/// Weighted goal probability of a belief.
double goal_probability(const GroundedModel& gm, const BeliefState& Z);

/// Chooses, step by step, the partition of each option with the highest running probability.
Plan resolve_plan(const GroundedModel& gm, const BeliefState& Z, const std::vector<OptionId>& options,
                  const PlanParams& params = {});

/// Fraction of rollouts in which every option initiates and, when `goal` is
/// given, the final state satisfies it.
double monte_carlo_success(const Environment& env, const StateSampler& start, const std::vector<OptionId>& options,
                           std::size_t rollouts, std::uint64_t seed, const GoalPredicate& goal = {});

/// Best-first search on running probability for a plan whose goal
/// probability reaches `prob_floor`.
std::optional<Plan> search_plan(const GroundedModel& gm, const BeliefState& Z, std::size_t max_depth,
                                double prob_floor = 0.75, const PlanParams& params = {});

}  // namespace portsym
