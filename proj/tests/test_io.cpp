#include <doctest.h>

#include "fixtures.hpp"
#include "portsym/model_io.hpp"
#include "portsym/ppddl.hpp"

#include <filesystem>

using namespace portsym;
using namespace portsym::testing;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "portsym_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

const PpddlAction* find_action(const PpddlDomain& d, const std::string& prefix) {
  for (const auto& a : d.actions)
    if (a.name.rfind(prefix, 0) == 0) return &a;
  return nullptr;
}

}  // namespace

TEST_SUITE("ppddl") {
  TEST_CASE("grounded and lifted domains survive emit then parse") {
    const auto& fx = corridor_fixture();
    const PpddlDomain grounded = to_ppddl(fx.grounded, "corridor");
    CHECK(parse_ppddl(emit_ppddl(grounded)) == grounded);
    CHECK(grounded.partition_function);
    CHECK(grounded.actions.size() == fx.grounded.operators.size());
    const PpddlDomain lifted = to_ppddl(*fx.model, "corridor");
    CHECK(parse_ppddl(emit_ppddl(lifted)) == lifted);
    CHECK(lifted.actions.size() == 6);
  }

  TEST_CASE("corridor Inward is emitted as an even probabilistic split") {
    const auto& fx = corridor_fixture();
    const std::string text = emit_ppddl(*fx.model, "corridor");
    CHECK(text.find("(probabilistic") != std::string::npos);
    const PpddlDomain d = parse_ppddl(text);
    const PpddlAction* inward = find_action(d, "Inward");
    REQUIRE(inward);
    REQUIRE(inward->outcomes.size() == 2);
    for (const auto& o : inward->outcomes) CHECK(std::abs(o.probability - 0.5) <= 0.1);
    const PpddlAction* cw = find_action(d, "Clockwise");
    REQUIRE(cw);
    CHECK(cw->outcomes.size() == 1);
  }

  TEST_CASE("every suite model round-trips") {
    auto rb_env = make_rod_block(2, 8);
    const Dataset rb = collect(*rb_env, 1000, 8);
    auto rb_model = std::make_shared<const PortableModel>(learn_portable(rb, default_learn_params(*rb_env, Space::Egocentric)));
    const GroundedModel rb_gm = ground(rb_model, rb, nullptr);
    const Dataset tel = branching_dataset({vec({1, 0}), vec({-1, 0})}, {0.5, 0.5}, 300, 8);
    auto tel_model = std::make_shared<const PortableModel>(learn_portable(tel, flat_learn_params()));
    for (const GroundedModel* gm : {&corridor_fixture().grounded, &rb_gm}) {
      const PpddlDomain d = to_ppddl(*gm);
      CHECK(parse_ppddl(emit_ppddl(d)) == d);
    }
    const GroundedModel tel_gm = ground(tel_model, tel, nullptr);
    const PpddlDomain d = to_ppddl(tel_gm);
    CHECK(parse_ppddl(emit_ppddl(d)) == d);
    CHECK(emit_ppddl(d).find("(probabilistic") != std::string::npos);
  }

  TEST_CASE("parse errors carry a position and the expected token") {
    try {
      parse_ppddl("(define (domain x)\n  (:requirements :strips)\n  (:action a :parameters () :precondition (and) :effect (probabilistic 1.5 (and))))");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() > 0);
      CHECK(std::string(e.what()).find("expected") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_ppddl("(define (domain x)"), ParseError);
    CHECK_THROWS_AS(parse_ppddl("(domain x)"), ParseError);
    CHECK_THROWS_AS(parse_ppddl(""), ParseError);
  }

  TEST_CASE("a hand-written domain parses") {
    const std::string text = R"((define (domain toy)
  (:requirements :strips :probabilistic-effects)
  (:predicates (a) (b) (notfailed))
  (:action go
    :parameters ()
    :precondition (and (a) (notfailed))
    :effect (probabilistic 0.25 (and (b) (not (a))) 0.75 (and (a))))
))";
    const PpddlDomain d = parse_ppddl(text);
    CHECK(d.name == "toy");
    REQUIRE(d.actions.size() == 1);
    CHECK(d.actions[0].precondition == std::vector<std::vector<std::string>>{{"a"}});
    REQUIRE(d.actions[0].outcomes.size() == 2);
    CHECK(d.actions[0].outcomes[0].add == std::vector<std::string>{"b"});
    CHECK(d.actions[0].outcomes[0].del == std::vector<std::string>{"a"});
    CHECK(d.actions[0].outcomes[1].probability == 0.75);
  }
}

TEST_SUITE("model_io") {
  TEST_CASE("portable model text is stable across a round trip") {
    const auto& fx = corridor_fixture();
    const std::string text = format_portable_model(*fx.model);
    const PortableModel back = parse_portable_model(text);
    CHECK(format_portable_model(back) == text);
    CHECK(back.rules.size() == fx.model->rules.size());
    CHECK(back.experience == fx.model->experience);
  }

  TEST_CASE("grounded model reloads with identical plan probabilities") {
    const auto& fx = corridor_fixture();
    const auto path = scratch("corridor.grounded.json");
    save_grounded_model(fx.grounded, path);
    const GroundedModel back = load_grounded_model(path);
    CHECK(format_grounded_model(back) == format_grounded_model(fx.grounded));
    const StateSampler start = [&](Rng& rng) { return fx.env->sample_in_region(0, rng); };
    const BeliefState Z = belief_from_states(*fx.env, start, fx.grounded.labels, 64, 1);
    const std::vector<OptionId> plan{CorridorEnvironment::Clockwise, CorridorEnvironment::Outward};
    CHECK(resolve_plan(back, Z, plan).probability == resolve_plan(fx.grounded, Z, plan).probability);
  }

  TEST_CASE("partitions, goals and starts round-trip") {
    const auto& fx = corridor_fixture();
    PartitionFile pf{Space::Problem, partition_options(fx.data, Space::Problem, {}, fit_space_scaling(fx.data, Space::Problem))};
    const PartitionFile pb = parse_partitions(format_partitions(pf));
    CHECK(pb.space == Space::Problem);
    CHECK(pb.partitions == pf.partitions);

    GoalSamples g;
    g.states = Matrix::Random(5, 2);
    g.in_goal = {true, false, false, true, false};
    const GoalSamples gb = parse_goals(format_goals(g));
    CHECK(gb.states == g.states);
    CHECK(gb.in_goal == g.in_goal);

    StartSamples s{Matrix::Random(3, 2), Matrix::Random(3, 4)};
    const StartSamples sb = parse_starts(format_starts(s));
    CHECK(sb.states == s.states);
    CHECK(sb.observations == s.observations);
  }

  TEST_CASE("malformed documents raise ParseError") {
    CHECK_THROWS_AS(parse_portable_model("{not json"), ParseError);
    CHECK_THROWS_AS(parse_portable_model(R"({"format": "portsym-goals", "version": 1})"), ParseError);
    CHECK_THROWS_AS(parse_grounded_model(R"({"format": "portsym-grounded", "version": 99})"), ParseError);
    CHECK_THROWS_AS(parse_goals(R"({"format": "portsym-goals", "version": 1, "states": [[0, 0]], "in_goal": []})"), ValidationError);
    CHECK_THROWS(load_portable_model(scratch("does-not-exist.json")));
  }
}

TEST_SUITE("harness") {
  TEST_CASE("curve CSV round-trips exactly") {
    const std::vector<CurvePoint> pts{{1, 1250.0, 101.5}, {2, 2000.0, 1.0 / 3.0}, {3, 2250.0, 0.0}};
    CHECK(parse_curve(format_curve(pts)) == pts);
    CHECK(format_curve(pts).rfind("task,mean_cumulative_samples,stderr\n", 0) == 0);
    const auto path = scratch("curve.csv");
    write_curve(pts, path);
    CHECK(read_curve(path) == pts);
    CHECK_THROWS_AS(parse_curve("task,mean_cumulative_samples,stderr\n1,abc,0\n"), ParseError);
  }

  TEST_CASE("svg plot has one band and one curve per series") {
    const std::vector<PlotSeries> series{{"portable", {{1, 500, 20}, {2, 800, 30}, {3, 1000, 35}}},
                                         {"task <specific>", {{1, 600, 10}, {2, 1200, 20}, {3, 1800, 30}}}};
    const std::string svg = render_svg(series, "rod & block");
    auto count = [&](const std::string& needle) {
      std::size_t n = 0;
      for (auto pos = svg.find(needle); pos != std::string::npos; pos = svg.find(needle, pos + 1)) ++n;
      return n;
    };
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(count("class=\"curve\"") == 2);
    CHECK(count("class=\"band\"") == 2);
    CHECK(svg.find("task &lt;specific&gt;") != std::string::npos);
    CHECK(svg.find("rod &amp; block") != std::string::npos);
  }

  TEST_CASE("evaluation plans reach their goal in exactly two steps") {
    auto env = make_rod_block(2, 9);
    const auto plans = sample_evaluation_plans(*env, 30, 9);
    REQUIRE(plans.size() == 30);
    Rng rng(9);
    for (const auto& p : plans) {
      CHECK(p.goal_region != p.start_region);
      auto sim = env->clone();
      sim->set_state(sim->sample_in_region(p.start_region, rng));
      REQUIRE(sim->execute(p.first).success);
      const auto mid = sim->region_of(sim->state());
      REQUIRE(mid.has_value());
      CHECK(*mid != p.goal_region);
      REQUIRE(sim->execute(p.second).success);
      CHECK(sim->region_of(sim->state()) == std::optional<std::size_t>(p.goal_region));
      // No single option reaches the goal from the start.
      for (const auto& d : env->options()) {
        auto one = env->clone();
        one->set_state(one->sample_in_region(p.start_region, rng));
        if (one->execute(d.option_id).success) CHECK(one->region_of(one->state()) != std::optional<std::size_t>(p.goal_region));
      }
    }
  }

  TEST_CASE("configuration validation and condition names") {
    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.threshold = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ExperimentConfig{};
    cfg.family = "chess";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ExperimentConfig{};
    cfg.permutations = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK(parse_condition("portable") == Condition::Portable);
    CHECK(parse_condition("task-specific") == Condition::TaskSpecific);
    CHECK(std::string(to_string(Condition::TaskSpecific)) == "task");
    CHECK_THROWS(parse_condition("both"));
  }

  TEST_CASE("a small experiment is deterministic and cumulative") {
    ExperimentConfig cfg;
    cfg.family = "corridor";
    cfg.num_tasks = 2;
    cfg.permutations = 2;
    cfg.goals_per_task = 10;
    cfg.seed = 3;
    const ExperimentResult a = run_transfer_experiment(cfg), b = run_transfer_experiment(cfg);
    CHECK(a.samples == b.samples);
    CHECK(a.curve == b.curve);
    REQUIRE(a.curve.size() == 2);
    CHECK(a.curve[1].cumulative_samples > a.curve[0].cumulative_samples);
    const auto mean = a.mean_per_task();
    CHECK(a.curve[0].cumulative_samples == doctest::Approx(mean[0]));
    for (const auto& row : a.samples)
      for (std::size_t s : row) CHECK(s % cfg.sample_step == 0);
  }
}
