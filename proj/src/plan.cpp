#include "portsym/plan.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

namespace portsym {

void BeliefState::normalize() {
  const double total = weights.sum();
  if (total > 0) weights /= total;
}

BeliefState belief_from_states(const Environment& env, const StateSampler& sampler, const LabelSet& labels,
                               std::size_t count, std::uint64_t seed, bool problem_space) {
  Rng rng(seed);
  auto probe = env.clone();
  probe->reseed(derive_seed(seed, 1));
  BeliefState Z;
  for (std::size_t i = 0; i < count; ++i) {
    const Vector s = sampler(rng);
    probe->set_state(s);
    Z.particles.push_back(problem_space ? s : probe->observe());
    Z.labels.push_back(labels.assign(s));
  }
  Z.weights = Vector::Constant(Index(count), count ? 1.0 / double(count) : 0.0);
  return Z;
}

std::pair<double, BeliefState> propagate(const GroundedModel& gm, const BeliefState& Z, const PlanStep& step, Rng& rng,
                                         std::size_t particles) {
  const PortableRule* rule = gm.portable->find_rule(step.option_id, step.partition);
  if (!rule)
    throw MissingOperatorError("no rule for option " + std::to_string(step.option_id) + " partition " +
                               std::to_string(step.partition));
  const std::size_t n = Z.size();
  Vector w = Vector::Zero(Index(n));
  std::vector<const GroundedOperator*> ops(n, nullptr);
  for (std::size_t i = 0; i < n; ++i) {
    ops[i] = Z.labels[i] >= 0 ? gm.find(step.option_id, step.partition, Z.labels[i]) : nullptr;
    w[Index(i)] = ops[i] ? Z.weights[Index(i)] * rule->precondition.classifier.probability(Z.particles[i]) : 0.0;
  }
  const double p = w.sum();
  BeliefState next;
  if (!(p > 0)) return {0.0, next};

  // Systematic resampling by posterior weight, then a draw from the linked outcome.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u0 = unit(rng) / double(particles);
  double cum = 0.0;
  std::size_t src = 0;
  next.weights = Vector::Constant(Index(particles), 1.0 / double(particles));
  for (std::size_t k = 0; k < particles; ++k) {
    const double u = (u0 + double(k) / double(particles)) * p;
    while (src + 1 < n && cum + w[Index(src)] < u) cum += w[Index(src++)];
    while (w[Index(src)] == 0.0 && src + 1 < n) cum += w[Index(src++)];
    while (w[Index(src)] == 0.0 && src > 0) cum -= w[Index(--src)];
    const GroundedOperator& op = *ops[src];
    double r = unit(rng), acc = 0.0;
    const LinkingEntry* chosen = &op.outcomes.back();
    for (const auto& e : op.outcomes)
      if ((acc += e.probability) >= r) {
        chosen = &e;
        break;
      }
    Vector x = Z.particles[src];
    for (int id : rule->outcomes[std::size_t(chosen->outcome)].effects) gm.portable->vocabulary.at(id).apply_sample(x, rng);
    next.particles.push_back(std::move(x));
    next.labels.push_back(chosen->end_label);
  }
  return {p, next};
}

double goal_probability(const GroundedModel& gm, const BeliefState& Z) {
  if (!gm.goal) throw std::invalid_argument("grounded model has no goal");
  double g = 0.0;
  for (std::size_t i = 0; i < Z.size(); ++i) {
    double gi = 0.0;
    if (gm.labels.trivial) gi = gm.goal->probability(Z.particles[i]);
    else if (Z.labels[i] >= 0) gi = gm.label_goal_probability[Z.labels[i]];
    g += Z.weights[Index(i)] * gi;
  }
  return g;
}

namespace {

void check_operators(const GroundedModel& gm, const std::vector<PlanStep>& plan) {
  for (const auto& s : plan) {
    const bool any = std::any_of(gm.operators.begin(), gm.operators.end(), [&](const GroundedOperator& op) {
      return op.option_id == s.option_id && op.partition == s.partition;
    });
    if (!any)
      throw MissingOperatorError("no grounded operator for option " + std::to_string(s.option_id) + " partition " +
                                 std::to_string(s.partition));
  }
}

}  // namespace

double plan_probability(const GroundedModel& gm, const BeliefState& Z, const std::vector<PlanStep>& plan, bool goal,
                        const PlanParams& params) {
  check_operators(gm, plan);
  Rng rng(params.seed);
  BeliefState belief = Z;
  belief.normalize();
  double prob = 1.0;
  for (const auto& step : plan) {
    auto [p, next] = propagate(gm, belief, step, rng, params.particles);
    prob *= p;
    if (!(prob > 0)) return 0.0;
    belief = std::move(next);
  }
  if (goal) prob *= goal_probability(gm, belief);
  return std::clamp(prob, 0.0, 1.0);
}

Plan resolve_plan(const GroundedModel& gm, const BeliefState& Z, const std::vector<OptionId>& options,
                  const PlanParams& params) {
  Plan plan;
  plan.probability = 1.0;
  BeliefState belief = Z;
  belief.normalize();
  for (std::size_t k = 0; k < options.size(); ++k) {
    double best_p = -1.0;
    PlanStep best_step{options[k], 0};
    BeliefState best_belief;
    for (const auto& rule : gm.portable->rules) {
      if (rule.option_id != options[k]) continue;
      Rng rng(derive_seed(params.seed, k, std::uint64_t(rule.partition)));
      auto [p, next] = propagate(gm, belief, {rule.option_id, rule.partition}, rng, params.particles);
      if (p > best_p) best_p = p, best_step = {rule.option_id, rule.partition}, best_belief = std::move(next);
    }
    plan.steps.push_back(best_step);
    plan.probability *= std::max(best_p, 0.0);
    if (!(plan.probability > 0)) {
      for (std::size_t j = k + 1; j < options.size(); ++j) plan.steps.push_back({options[j], 0});
      plan.probability = 0.0;
      return plan;
    }
    belief = std::move(best_belief);
  }
  return plan;
}

double monte_carlo_success(const Environment& env, const StateSampler& start, const std::vector<OptionId>& options,
                           std::size_t rollouts, std::uint64_t seed, const GoalPredicate& goal) {
  if (rollouts < 1) throw std::invalid_argument("monte_carlo_success: rollouts must be positive");
  Rng rng(seed);
  auto sim = env.clone();
  sim->reseed(derive_seed(seed, 1));
  std::size_t ok = 0;
  for (std::size_t r = 0; r < rollouts; ++r) {
    sim->set_state(start(rng));
    bool success = true;
    for (OptionId o : options)
      if (!sim->execute(o).success) {
        success = false;
        break;
      }
    if (success && goal && !goal(sim->state())) success = false;
    ok += success;
  }
  return double(ok) / double(rollouts);
}

std::optional<Plan> search_plan(const GroundedModel& gm, const BeliefState& Z, std::size_t max_depth, double prob_floor,
                                const PlanParams& params) {
  if (!(prob_floor >= 0 && prob_floor <= 1)) throw std::invalid_argument("search_plan: prob_floor must lie in [0, 1]");
  struct Node {
    double priority;
    std::size_t order;
    bool terminal;
    std::vector<PlanStep> steps;
    BeliefState belief;
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.priority != b.priority) return a.priority < b.priority;
    if (a.terminal != b.terminal) return !a.terminal;
    return a.order > b.order;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  std::size_t order = 0;
  std::vector<PlanStep> actions;
  for (const auto& op : gm.operators) actions.push_back({op.option_id, op.partition});
  std::sort(actions.begin(), actions.end());
  actions.erase(std::unique(actions.begin(), actions.end()), actions.end());

  auto signature = [](const BeliefState& b) {
    std::map<int, double> hist;
    for (std::size_t i = 0; i < b.size(); ++i) hist[b.labels[i]] += b.weights[Index(i)];
    std::vector<std::pair<int, long>> key;
    for (auto& [l, w] : hist) key.emplace_back(l, std::lround(w * 20.0));
    return key;
  };

  BeliefState start = Z;
  start.normalize();
  auto push = [&](double running, std::vector<PlanStep> steps, BeliefState belief) {
    const double g = gm.goal ? running * goal_probability(gm, belief) : 0.0;
    if (g >= prob_floor) open.push({g, order++, true, steps, {}});
    open.push({running, order++, false, std::move(steps), std::move(belief)});
  };
  push(1.0, {}, start);
  std::set<std::vector<std::pair<int, long>>> closed;
  Rng rng(params.seed);
  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.terminal) return Plan{node.steps, node.priority};
    if (node.priority < prob_floor || node.steps.size() >= max_depth) continue;
    if (!closed.insert(signature(node.belief)).second) continue;
    for (const auto& a : actions) {
      auto [p, next] = propagate(gm, node.belief, a, rng, params.particles);
      if (p < prob_floor || next.size() == 0) continue;
      auto steps = node.steps;
      steps.push_back(a);
      push(node.priority * p, std::move(steps), std::move(next));
    }
  }
  return std::nullopt;
}

}  // namespace portsym
