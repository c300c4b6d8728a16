#include <doctest.h>

#include "fixtures.hpp"

#include <cmath>

using namespace portsym;
using namespace portsym::testing;

namespace {

using C = CorridorEnvironment;

StateSampler at_place(const Environment& env, C::Place p) {
  const Eigen::Vector2d xy = static_cast<const C&>(env).place_position(p);
  return [xy](Rng& rng) {
    std::normal_distribution<double> g(0.0, 0.01);
    return vec({xy.x() + g(rng), xy.y() + g(rng)});
  };
}

GoalSamples goals_near(const Dataset& ds, const Eigen::Vector2d& center, double radius) {
  GoalSamples g;
  g.states.resize(Index(ds.size()), 2);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Vector& s = ds.transitions[i].state;
    g.states.row(Index(i)) = s.transpose();
    g.in_goal.push_back((s - Vector(center)).norm() < radius);
  }
  return g;
}

std::vector<PlanStep> steps_of(const Plan& p) { return p.steps; }

}  // namespace

TEST_SUITE("ground") {
  TEST_CASE("corridor problem-space labels match the four places") {
    const auto& fx = corridor_fixture();
    const LabelResult lr = label_problem_partitions(fx.data, GroundParams{});
    CHECK(lr.labels.size() == 4);
    // Every start state lies in some label.
    for (int l : lr.start_label) CHECK(l >= 0);
    for (std::size_t p = 0; p < C::kNumPlaces; ++p) {
      const Eigen::Vector2d xy = static_cast<const C&>(*fx.env).place_position(C::Place(p));
      CHECK(lr.labels.assign(vec({xy.x(), xy.y()})) >= 0);
    }
    CHECK(lr.labels.assign(vec({0.0, 5.0})) == -1);
  }

  TEST_CASE("deterministic corridor options link to a single end label") {
    const auto& gm = corridor_fixture().grounded;
    CHECK(gm.labels.size() == 4);
    for (const auto& [key, row] : gm.linking.rows) {
      double sum = 0.0;
      for (const auto& e : row) sum += e.probability;
      CHECK(sum == doctest::Approx(1.0).epsilon(0.01));
      CHECK(gm.linking.end_distribution(key).size() == 1);
      CHECK(gm.linking.end_distribution(key).begin()->second == doctest::Approx(1.0));
    }
  }

  TEST_CASE("a teleporter links one start label to two end labels at one half") {
    const Dataset ds = branching_dataset({vec({1, 0}), vec({-1, 0})}, {0.5, 0.5}, 600, 21);
    auto model = std::make_shared<const PortableModel>(learn_portable(ds, flat_learn_params()));
    const GroundedModel gm = ground(model, ds, nullptr);
    const int origin = gm.labels.assign(vec({0, 0}));
    REQUIRE(origin >= 0);
    const auto dist = gm.linking.end_distribution({0, 0, origin});
    REQUIRE(dist.size() == 2);
    for (const auto& [label, p] : dist) {
      CHECK(label != origin);
      CHECK(std::abs(p - 0.5) <= 0.07);
    }
  }

  TEST_CASE("one operator per linking row") {
    const auto& gm = corridor_fixture().grounded;
    CHECK(gm.operators.size() == gm.linking.rows.size());
    for (const auto& op : gm.operators) {
      const auto* found = gm.find(op.option_id, op.partition, op.start_label);
      REQUIRE(found);
      CHECK(*found == op);
      CHECK(gm.portable->find_rule(op.option_id, op.partition));
    }
  }

  TEST_CASE("goal classifier picks out the goal disk") {
    const auto& fx = corridor_fixture();
    const Eigen::Vector2d target = static_cast<const C&>(*fx.env).place_position(C::WindowDeadEnd);
    const GoalSamples goals = goals_near(fx.data, target, 0.3);
    const GroundedModel gm = ground(fx.model, fx.data, &goals);
    REQUIRE(gm.goal.has_value());
    CHECK(gm.goal->probability(vec({target.x(), target.y()})) > 0.9);
    const int goal_label = gm.labels.assign(vec({target.x(), target.y()}));
    for (int l = 0; l < gm.labels.size(); ++l) {
      if (l == goal_label) CHECK(gm.label_goal_probability[l] > 0.9);
      else CHECK(gm.label_goal_probability[l] < 0.1);
    }
  }

  TEST_CASE("an empty linking function grounds no operators") {
    const auto& fx = corridor_fixture();
    const GroundedModel gm = ground_rules(fx.model, LinkingFunction{}, fx.grounded.labels, nullptr);
    CHECK(gm.operators.empty());
    const BeliefState Z = belief_from_states(*fx.env, at_place(*fx.env, C::WallJunction), gm.labels, 16, 1);
    CHECK_THROWS_AS(plan_probability(gm, Z, {{C::Outward, 0}}, false), MissingOperatorError);
  }

  TEST_CASE("trivial grounding carries each rule's outcomes") {
    const auto& fx = corridor_fixture();
    const GroundedModel gm = ground_trivially(fx.model);
    CHECK(gm.labels.trivial);
    CHECK(gm.operators.size() == fx.model->rules.size());
    CHECK(gm.labels.assign(vec({100.0, -3.0})) == 0);
  }

  TEST_CASE("problem-space view swaps observations for states") {
    const auto& fx = corridor_fixture();
    const Dataset v = problem_space_view(fx.data);
    REQUIRE(v.size() == fx.data.size());
    CHECK(v.transitions[5].obs == fx.data.transitions[5].state);
    CHECK(v.transitions[5].next_obs == fx.data.transitions[5].next_state);
  }
}

TEST_SUITE("plan") {
  TEST_CASE("the empty plan succeeds with certainty") {
    const auto& fx = corridor_fixture();
    const BeliefState Z = belief_from_states(*fx.env, at_place(*fx.env, C::WallJunction), fx.grounded.labels, 16, 1);
    CHECK(plan_probability(fx.grounded, Z, {}, false) == 1.0);
  }

  TEST_CASE("a never-executable precondition zeroes the plan") {
    const auto& fx = corridor_fixture();
    PortableModel m = *fx.model;
    for (auto& r : m.rules)
      if (r.option_id == C::Outward) r.precondition.classifier = ProbabilisticClassifier::constant(0.0, m.obs_dim);
    const GroundedModel gm = ground(std::make_shared<const PortableModel>(std::move(m)), fx.data, nullptr);
    const BeliefState Z = belief_from_states(*fx.env, at_place(*fx.env, C::WallJunction), gm.labels, 16, 1);
    // Constant classifiers are clamped to [1e-12, 1 - 1e-12] to keep the sigmoid finite.
    CHECK(resolve_plan(gm, Z, {C::Outward}).probability <= 1e-9);
    CHECK(resolve_plan(gm, Z, {C::Clockwise, C::Outward}).probability <= 1e-9);
  }

  TEST_CASE("plan probability agrees with simulator rollouts") {
    const auto& fx = corridor_fixture();
    // Half the starts at the wall junction, half at its dead-end: Outward then Inward succeeds only from the junction.
    const StateSampler junction = at_place(*fx.env, C::WallJunction), dead_end = at_place(*fx.env, C::WallDeadEnd);
    const StateSampler mixed = [&](Rng& rng) { return std::uniform_int_distribution<int>(0, 1)(rng) ? junction(rng) : dead_end(rng); };
    const std::vector<std::vector<OptionId>> plans = {
        {C::Outward, C::Inward}, {C::Clockwise, C::Outward}, {C::Inward, C::Anticlockwise}, {C::Outward, C::Outward}};
    const BeliefState Z = belief_from_states(*fx.env, mixed, fx.grounded.labels, 400, 2);
    for (const auto& options : plans) {
      const double model = resolve_plan(fx.grounded, Z, options, {400, 3}).probability;
      const double mc = monte_carlo_success(*fx.env, mixed, options, 1000, 4);
      CHECK(std::abs(model - mc) <= 0.05);
    }
    CHECK(monte_carlo_success(*fx.env, mixed, {C::Outward, C::Inward}, 1000, 4) == doctest::Approx(0.5).epsilon(0.1));
  }

  TEST_CASE("probability never grows along a plan's prefixes") {
    const auto& fx = corridor_fixture();
    auto rb_env = make_rod_block(3, 6);
    const Dataset rb = collect(*rb_env, 1500, 6);
    auto rb_model = std::make_shared<const PortableModel>(learn_portable(rb, default_learn_params(*rb_env, Space::Egocentric)));
    const GroundedModel rb_gm = ground(rb_model, rb, nullptr);
    struct Case {
      const GroundedModel* gm;
      const Environment* env;
    };
    Rng rng(7);
    for (const Case& c : {Case{&fx.grounded, fx.env.get()}, Case{&rb_gm, rb_env.get()}}) {
      const auto regions = c.env->regions();
      const std::size_t n_options = c.env->options().size();
      for (int trial = 0; trial < 10; ++trial) {
        const std::size_t r = std::uniform_int_distribution<std::size_t>(0, regions.size() - 1)(rng);
        const StateSampler start = [&, r](Rng& g) { return c.env->sample_in_region(r, g); };
        const BeliefState Z = belief_from_states(*c.env, start, c.gm->labels, 64, std::uint64_t(trial));
        std::vector<OptionId> options;
        for (int k = 0; k < 4; ++k) options.push_back(OptionId(std::uniform_int_distribution<std::size_t>(0, n_options - 1)(rng)));
        const Plan full = resolve_plan(*c.gm, Z, options, {64, 9});
        try {
          plan_probability(*c.gm, Z, full.steps, false, {64, 9});
        } catch (const MissingOperatorError&) {
          continue;
        }
        double prev = 1.0;
        for (std::size_t k = 0; k <= full.steps.size(); ++k) {
          const std::vector<PlanStep> prefix(full.steps.begin(), full.steps.begin() + std::ptrdiff_t(k));
          const double p = plan_probability(*c.gm, Z, prefix, false, {64, 9});
          CHECK(p <= prev + 1e-12);
          prev = p;
        }
      }
    }
  }

  TEST_CASE("search finds a plan to a goal the simulator confirms") {
    const auto& fx = corridor_fixture();
    const Eigen::Vector2d target = static_cast<const C&>(*fx.env).place_position(C::WindowDeadEnd);
    const GoalSamples goals = goals_near(fx.data, target, 0.3);
    const GroundedModel gm = ground(fx.model, fx.data, &goals);
    const StateSampler start = at_place(*fx.env, C::WallJunction);
    const BeliefState Z = belief_from_states(*fx.env, start, gm.labels, 64, 3);
    const auto plan = search_plan(gm, Z, 4, 0.75);
    REQUIRE(plan.has_value());
    CHECK(plan->probability >= 0.75);
    CHECK(plan->steps.size() == 2);
    std::vector<OptionId> options;
    for (const auto& s : steps_of(*plan)) options.push_back(s.option_id);
    const GoalPredicate in_goal = [&](const Vector& s) { return (s - Vector(target)).norm() < 0.3; };
    CHECK(monte_carlo_success(*fx.env, start, options, 200, 5, in_goal) > 0.95);
    // Already there: the empty plan.
    const BeliefState there = belief_from_states(*fx.env, at_place(*fx.env, C::WindowDeadEnd), gm.labels, 64, 3);
    const auto none = search_plan(gm, there, 4, 0.75);
    REQUIRE(none.has_value());
    CHECK(none->steps.empty());
  }

  TEST_CASE("search reports failure when the goal is unreachable") {
    const auto& fx = corridor_fixture();
    GoalSamples goals = goals_near(fx.data, {50.0, 50.0}, 0.3);
    goals.states.conservativeResize(goals.states.rows() + 20, 2);
    for (int i = 0; i < 20; ++i) {
      goals.states.row(goals.states.rows() - 20 + i) << 50.0 + 0.01 * i, 50.0;
      goals.in_goal.push_back(true);
    }
    const GroundedModel gm = ground(fx.model, fx.data, &goals);
    const BeliefState Z = belief_from_states(*fx.env, at_place(*fx.env, C::WallJunction), gm.labels, 32, 3);
    CHECK_FALSE(search_plan(gm, Z, 3, 0.75).has_value());
  }
}
