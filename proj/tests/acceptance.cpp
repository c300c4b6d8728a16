// Acceptance checks, one per criterion. Each prints a single PASS or FAIL line
// followed by indented detail, and exits non-zero on FAIL.

#include "fixtures.hpp"
#include "portsym/model_io.hpp"
#include "portsym/ppddl.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

using namespace portsym;
using namespace portsym::testing;

namespace {

using C = CorridorEnvironment;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "  violated: " << what << "\n";
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x, int precision = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << x;
  return os.str();
}

StateSampler region_sampler(const Environment& env, std::size_t region) {
  return [&env, region](Rng& rng) { return env.sample_in_region(region, rng); };
}

// ---------------------------------------------------------------------------
// 1. Corridor rule table.

std::string corridor_place_name(const Symbol& s) {
  // Nearest prototype on the symbol's masked variables; the two dead-ends look alike.
  const Vector mean = s.density.mean();
  std::string best;
  double best_d = std::numeric_limits<double>::infinity();
  for (auto [place, name] : {std::pair{C::WallJunction, "wall-junction"}, std::pair{C::WindowJunction, "window-junction"},
                             std::pair{C::WallDeadEnd, "dead-end"}}) {
    const Vector proto = C::prototype(place);
    double d = 0.0;
    for (std::size_t k = 0; k < s.mask.size(); ++k) d += std::pow(proto[s.mask[k]] - mean[Index(k)], 2);
    if (d < best_d) best_d = d, best = name;
  }
  return best;
}

Verdict criterion_corridor_rules() {
  Verdict v;
  const auto t0 = Clock::now();
  auto env = make_corridor({0.0, 0.0}, 0);
  const Dataset ds = collect(*env, 2000, 0);
  const PortableModel m = learn_portable(ds, default_learn_params(*env, Space::Egocentric));
  const double secs = seconds_since(t0);

  std::map<int, std::string> name;
  for (const auto& s : m.vocabulary.symbols()) name[s.id] = corridor_place_name(s);
  std::set<std::string> distinct;
  for (const auto& [id, n] : name) distinct.insert(n);

  // Table rows: option, precondition names, outcome name -> probability.
  using Row = std::tuple<std::string, std::set<std::string>, std::map<std::string, double>>;
  std::multiset<std::pair<std::string, std::set<std::string>>> got_shape;
  std::vector<Row> rows;
  for (const auto& r : m.rules) {
    std::set<std::string> pre;
    for (const auto& clause : r.precondition.symbolic)
      for (int id : clause) pre.insert(name[id]);
    std::map<std::string, double> eff;
    for (const auto& o : r.outcomes) {
      std::string e;
      for (int id : o.effects) e += (e.empty() ? "" : "+") + name[id];
      eff[e] += o.probability;
    }
    std::set<std::string> shape;
    for (const auto& [e, p] : eff) shape.insert(e);
    rows.emplace_back(r.option_name, pre, eff);
    v.detail << "  " << r.option_name << " p" << r.partition << ": pre {";
    for (const auto& p : pre) v.detail << " " << p;
    v.detail << " } eff {";
    for (const auto& [e, p] : eff) v.detail << " " << e << "@" << fmt(p);
    v.detail << " }\n";
  }

  using Key = std::tuple<std::string, std::set<std::string>, std::set<std::string>>;
  const std::multiset<Key> expected = {
      {"Clockwise", {"wall-junction"}, {"window-junction"}},
      {"Clockwise", {"window-junction"}, {"wall-junction"}},
      {"Anticlockwise", {"wall-junction"}, {"window-junction"}},
      {"Anticlockwise", {"window-junction"}, {"wall-junction"}},
      {"Outward", {"wall-junction", "window-junction"}, {"dead-end"}},
      {"Inward", {"dead-end"}, {"wall-junction", "window-junction"}},
  };
  std::multiset<Key> got;
  for (const auto& [opt, pre, eff] : rows) {
    std::set<std::string> outs;
    for (const auto& [e, p] : eff) outs.insert(e);
    got.insert({opt, pre, outs});
    if (opt == "Inward")
      for (const auto& [e, p] : eff) v.require(std::abs(p - 0.5) <= 0.1, "Inward outcome " + e + " probability " + fmt(p) + " within 0.5 +- 0.1");
  }
  v.require(m.vocabulary.size() == 3, "exactly 3 symbols (got " + std::to_string(m.vocabulary.size()) + ")");
  v.require(distinct.size() == 3, "symbols name three distinct places");
  v.require(m.rules.size() == 6, "exactly 6 rules (got " + std::to_string(m.rules.size()) + ")");
  v.require(got == expected, "rule table matches the six subgoal options");
  v.require(secs < 60.0, "runtime under 1 minute");
  v.detail << "  runtime " << fmt(secs, 2) << " s\n";
  return v;
}

// ---------------------------------------------------------------------------
// 2. Plan probability against simulator rollouts.

Verdict criterion_oracle_agreement() {
  Verdict v;
  const auto t0 = Clock::now();
  struct Task {
    std::unique_ptr<Environment> env;
    GroundedModel gm;
  };
  std::vector<Task> tasks;
  {
    auto env = make_corridor({0.0, 0.0}, 0);
    const Dataset ds = collect(*env, 2000, 0);
    auto m = std::make_shared<const PortableModel>(learn_portable(ds, default_learn_params(*env, Space::Egocentric)));
    tasks.push_back({std::move(env), ground(m, ds, nullptr)});
  }
  {
    auto env = make_rod_block(3, 1);
    CollectOptions co;
    co.episode_length = 50;
    const Dataset ds = collect(*env, 10000, 1, co);
    auto m = std::make_shared<const PortableModel>(learn_portable(ds, default_learn_params(*env, Space::Egocentric)));
    tasks.push_back({std::move(env), ground(m, ds, nullptr, default_ground_params("rodblock"))});
  }

  Rng rng(2024);
  double worst = 0.0;
  int evaluated = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const Environment& env = *tasks[t].env;
    const auto regions = env.regions();
    const std::size_t n_opts = env.options().size();
    for (int k = 0; k < 25; ++k) {
      const std::size_t r = std::uniform_int_distribution<std::size_t>(0, regions.size() - 1)(rng);
      const std::vector<OptionId> options{OptionId(std::uniform_int_distribution<std::size_t>(0, n_opts - 1)(rng)),
                                          OptionId(std::uniform_int_distribution<std::size_t>(0, n_opts - 1)(rng))};
      const StateSampler start = region_sampler(env, r);
      const BeliefState Z = belief_from_states(env, start, tasks[t].gm.labels, 1000, derive_seed(7, t, std::uint64_t(k)));
      double model = 0.0;
      try {
        model = resolve_plan(tasks[t].gm, Z, options, {1000, derive_seed(8, t, std::uint64_t(k))}).probability;
      } catch (const MissingOperatorError&) {
        model = 0.0;
      }
      const double mc = monte_carlo_success(env, start, options, 1000, derive_seed(9, t, std::uint64_t(k)));
      const double err = std::abs(model - mc);
      worst = std::max(worst, err);
      ++evaluated;
      if (err > 0.05)
        v.require(false, env.family() + " region " + std::to_string(r) + " plan [" + env.option_name(options[0]) + ", " +
                             env.option_name(options[1]) + "]: model " + fmt(model) + " vs rollouts " + fmt(mc));
    }
  }
  const double secs = seconds_since(t0);
  v.require(evaluated == 50, "50 plans evaluated");
  v.require(secs < 300.0, "runtime under 5 minutes");
  v.detail << "  plans " << evaluated << ", worst |model - rollouts| " << fmt(worst) << ", runtime " << fmt(secs, 1) << " s\n";
  return v;
}

// ---------------------------------------------------------------------------
// 3 and 4. Transfer curves.

struct Curves {
  ExperimentResult portable;
  ExperimentResult task;
  double secs = 0.0;
};

Curves run_both(const std::string& family) {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.family = family;
  cfg.permutations = 10;
  Curves c;
  cfg.condition = Condition::Portable;
  c.portable = run_transfer_experiment(cfg);
  cfg.condition = Condition::TaskSpecific;
  c.task = run_transfer_experiment(cfg);
  c.secs = seconds_since(t0);
  return c;
}

void describe(Verdict& v, const Curves& c) {
  const auto mp = c.portable.mean_per_task(), mt = c.task.mean_per_task();
  v.detail << "  task  portable/task  cumulative portable/task\n";
  for (std::size_t k = 0; k < mp.size(); ++k)
    v.detail << "  " << std::setw(4) << k + 1 << "  " << std::setw(7) << fmt(mp[k], 0) << " / " << std::setw(6) << fmt(mt[k], 0)
             << "  " << std::setw(8) << fmt(c.portable.curve[k].cumulative_samples, 0) << " / "
             << fmt(c.task.curve[k].cumulative_samples, 0) << "\n";
  v.detail << "  warnings " << c.portable.warnings.size() + c.task.warnings.size() << ", runtime " << fmt(c.secs, 1) << " s\n";
}

Verdict criterion_rodblock_transfer() {
  Verdict v;
  const Curves c = run_both("rodblock");
  describe(v, c);
  const auto mp = c.portable.mean_per_task();
  const double drop = 1.0 - mp[2] / mp[0];
  v.detail << "  drop task 1 -> 3: " << fmt(100 * drop, 1) << "%\n";
  v.require(drop >= 0.40, "portable per-task samples drop by at least 40% from task 1 to task 3");
  for (std::size_t k = 2; k < c.portable.curve.size(); ++k)
    v.require(c.portable.curve[k].cumulative_samples < c.task.curve[k].cumulative_samples,
              "portable cumulative below task-specific at task " + std::to_string(k + 1));
  v.require(c.secs < 1800.0, "runtime under 30 minutes");
  return v;
}

Verdict criterion_treasure_transfer() {
  Verdict v;
  const Curves c = run_both("treasure");
  describe(v, c);
  const auto mp = c.portable.mean_per_task();
  const double late = (mp[7] + mp[8] + mp[9]) / 3.0;
  v.detail << "  tasks 8-10 mean / task 1: " << fmt(late / mp[0]) << "\n";
  v.require(late <= 0.6 * mp[0], "portable per-task samples over tasks 8-10 at most 60% of task 1");
  const auto& cp = c.portable.curve;
  for (std::size_t k = 2; k < cp.size(); ++k)
    v.require(cp[k].cumulative_samples < double(k + 1) * cp[0].cumulative_samples,
              "portable cumulative sublinear at task " + std::to_string(k + 1));
  v.require(cp.back().cumulative_samples < c.task.curve.back().cumulative_samples,
            "portable cumulative total below the task-specific total");
  v.require(c.secs < 3600.0, "runtime under 60 minutes");
  return v;
}

// ---------------------------------------------------------------------------
// 5. Transfer invariance.

GoalSamples window_dead_end_goals(const Environment& env, const Dataset& ds) {
  const Eigen::Vector2d g = static_cast<const C&>(env).place_position(C::WindowDeadEnd);
  GoalSamples out;
  out.states.resize(Index(ds.size()), 2);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out.states.row(Index(i)) = ds.transitions[i].state.transpose();
    out.in_goal.push_back((ds.transitions[i].state - Vector(g)).norm() < 0.3);
  }
  return out;
}

Verdict criterion_transfer_invariance() {
  Verdict v;
  auto env_a = make_corridor({0.0, 0.0}, 0);
  auto env_b = make_corridor({3.5, -2.0}, 1);
  const Dataset da = collect(*env_a, 2000, 0), db = collect(*env_b, 2000, 1);
  auto model_a = std::make_shared<const PortableModel>(learn_portable(da, default_learn_params(*env_a, Space::Egocentric)));
  auto model_b = std::make_shared<const PortableModel>(learn_portable(db, default_learn_params(*env_b, Space::Egocentric)));
  const GoalSamples goals_a = window_dead_end_goals(*env_a, da), goals_b = window_dead_end_goals(*env_b, db);

  const GroundedModel a_on_a = ground(model_a, da, &goals_a);
  const GroundedModel a_on_b = ground(model_a, db, &goals_b);
  const GroundedModel b_on_b = ground(model_b, db, &goals_b);

  const auto portable_bytes = [](const GroundedModel& gm) {
    return nlohmann::json::parse(format_grounded_model(gm)).at("portable").dump();
  };
  v.require(portable_bytes(a_on_a) == portable_bytes(a_on_b), "portable rule bytes identical across groundings");
  v.require(portable_bytes(a_on_b) == nlohmann::json::parse(format_portable_model(*model_a)).dump(),
            "grounding leaves the portable model untouched");

  double worst = 0.0;
  int compared = 0;
  const auto regions = env_b->regions();
  for (std::size_t r = 0; r < regions.size(); ++r)
    for (OptionId o1 = 0; o1 < 4; ++o1)
      for (OptionId o2 = 0; o2 < 4; ++o2) {
        const std::uint64_t seed = derive_seed(5, r, std::uint64_t(4 * o1 + o2));
        const BeliefState Z = belief_from_states(*env_b, region_sampler(*env_b, r), a_on_b.labels, 500, seed);
        const Plan pa = resolve_plan(a_on_b, Z, {o1, o2}, {500, seed});
        const Plan pb = resolve_plan(b_on_b, Z, {o1, o2}, {500, seed});
        const double ga = plan_probability(a_on_b, Z, pa.steps, true, {500, seed});
        const double gb = plan_probability(b_on_b, Z, pb.steps, true, {500, seed});
        for (auto [x, y, what] : {std::tuple{pa.probability, pb.probability, "feasibility"}, std::tuple{ga, gb, "goal"}}) {
          const double err = std::abs(x - y);
          worst = std::max(worst, err);
          ++compared;
          if (err > 0.05)
            v.require(false, std::string(what) + " probability region " + std::to_string(r) + " [" + env_b->option_name(o1) + ", " +
                                 env_b->option_name(o2) + "]: transferred " + fmt(x) + " vs native " + fmt(y));
        }
      }
  v.detail << "  compared " << compared << " probabilities, worst difference " << fmt(worst) << "\n";
  return v;
}

// ---------------------------------------------------------------------------
// 6. PPDDL round trip.

Verdict criterion_ppddl() {
  Verdict v;
  std::vector<std::pair<std::string, PpddlDomain>> domains;
  const auto& fx = corridor_fixture();
  domains.emplace_back("corridor grounded", to_ppddl(fx.grounded, "corridor"));
  domains.emplace_back("corridor lifted", to_ppddl(*fx.model, "corridor"));
  domains.emplace_back("corridor trivial", to_ppddl(ground_trivially(fx.model), "corridor"));

  std::vector<GroundedModel> models;
  {
    auto env = make_rod_block(3, 1);
    const Dataset ds = collect(*env, 2000, 1);
    auto m = std::make_shared<const PortableModel>(learn_portable(ds, default_learn_params(*env, Space::Egocentric)));
    models.push_back(ground(m, ds, nullptr));
    domains.emplace_back("rodblock grounded", to_ppddl(models.back(), "rodblock"));
    auto tm = std::make_shared<const PortableModel>(learn_portable(problem_space_view(ds), default_learn_params(*env, Space::Problem)));
    domains.emplace_back("rodblock task-specific", to_ppddl(ground_trivially(tm), "rodblock_task"));
  }
  {
    auto env = make_treasure(2, 0);
    const Dataset ds = collect(*env, 3000, 2);
    auto m = std::make_shared<const PortableModel>(learn_portable(ds, default_learn_params(*env, Space::Egocentric)));
    models.push_back(ground(m, ds, nullptr, default_ground_params("treasure")));
    domains.emplace_back("treasure grounded", to_ppddl(models.back(), "treasure"));
  }
  {
    const Dataset ds = branching_dataset({vec({1, 0}), vec({-1, 0})}, {0.5, 0.5}, 400, 3);
    auto m = std::make_shared<const PortableModel>(learn_portable(ds, flat_learn_params()));
    models.push_back(ground(m, ds, nullptr));
    domains.emplace_back("teleporter grounded", to_ppddl(models.back(), "teleporter"));
  }

  for (const auto& [label, d] : domains) {
    const std::string text = emit_ppddl(d);
    bool equal = false;
    try {
      equal = parse_ppddl(text) == d;
    } catch (const ParseError& e) {
      v.detail << "  " << label << ": " << e.what() << "\n";
    }
    v.require(equal, label + ": parse(emit) equals the domain");
    v.detail << "  " << label << ": " << d.actions.size() << " actions, " << text.size() << " bytes\n";
  }

  const std::string lifted = emit_ppddl(*fx.model, "corridor");
  const auto at = lifted.find("(:action Inward");
  v.require(at != std::string::npos && lifted.find("(probabilistic", at) != std::string::npos,
            "corridor Inward emitted as a probabilistic effect");
  for (const auto& a : parse_ppddl(lifted).actions)
    if (a.name.rfind("Inward", 0) == 0) {
      v.require(a.outcomes.size() == 2, "corridor Inward has two outcomes");
      for (const auto& o : a.outcomes) v.require(std::abs(o.probability - 0.5) <= 0.1, "Inward outcome probability 0.5 +- 0.1");
    }
  return v;
}

// ---------------------------------------------------------------------------
// 7. Properties.

/// Integral of a KDE by importance sampling from an independently coded
/// mixture with a 1.25x bandwidth around the same centres, which bounds p/q by 1.25^d.
double kde_integral(const GaussianKde& kde, std::size_t n, Rng& rng) {
  const Matrix& centers = kde.centers();
  const Vector wide = 1.25 * kde.bandwidth();
  const Index d = kde.dim();
  std::uniform_int_distribution<Index> pick(0, centers.rows() - 1);
  std::normal_distribution<double> g(0.0, 1.0);
  const double log_norm = -0.5 * double(d) * std::log(2.0 * std::numbers::pi) - wide.array().log().sum();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Vector x = centers.row(pick(rng)).transpose();
    for (Index k = 0; k < d; ++k) x[k] += wide[k] * g(rng);
    double q = 0.0;
    for (Index c = 0; c < centers.rows(); ++c)
      q += std::exp(log_norm - 0.5 * ((x - centers.row(c).transpose()).cwiseQuotient(wide)).squaredNorm());
    q /= double(centers.rows());
    sum += kde.density(x) / q;
  }
  return sum / double(n);
}

Verdict criterion_properties() {
  Verdict v;
  const auto t0 = Clock::now();
  struct Case {
    std::string label;
    std::unique_ptr<Environment> env;
    Dataset data;
    std::shared_ptr<const PortableModel> model;
    GroundedModel gm;
  };
  std::vector<Case> cases;
  auto add = [&](std::string label, std::unique_ptr<Environment> env, std::size_t n, std::uint64_t seed) {
    Case c{std::move(label), std::move(env), {}, nullptr, {}};
    c.data = collect(*c.env, n, seed);
    c.model = std::make_shared<const PortableModel>(learn_portable(c.data, default_learn_params(*c.env, Space::Egocentric)));
    c.gm = ground(c.model, c.data, nullptr, default_ground_params(c.env->family()));
    cases.push_back(std::move(c));
  };
  add("corridor", make_corridor({-1.0, 2.0}, 4), 2000, 4);
  add("rodblock", make_rod_block(2, 5), 2000, 5);
  add("treasure", make_treasure(4, 0), 3000, 6);

  std::size_t partition_checks = 0, merge_checks = 0, densities = 0, rows = 0, prefixes = 0, undefined = 0;
  double worst_integral = 0.0, worst_row = 0.0;
  Rng rng(77);
  for (auto& c : cases) {
    // Partitions: disjoint and exhaustive over each option's successes; merging is idempotent.
    for (Space space : {Space::Egocentric, Space::Problem}) {
      const PartitionParams params;
      const RangeScaling scaling = fit_space_scaling(c.data, space);
      for (const auto& d : c.env->options()) {
        const auto merged = merge_overlapping(cluster_effects(c.data, d.option_id, space, params, scaling), c.data, params, scaling);
        std::multiset<std::size_t> seen, expected;
        for (const auto& p : merged) seen.insert(p.members.begin(), p.members.end());
        for (std::size_t i = 0; i < c.data.size(); ++i)
          if (c.data.transitions[i].option_id == d.option_id && c.data.transitions[i].success) expected.insert(i);
        v.require(seen == expected, c.label + " " + to_string(space) + " " + d.name + ": partitions disjoint and exhaustive");
        v.require(merge_overlapping(merged, c.data, params, scaling) == merged, c.label + " " + d.name + ": merge idempotent");
        ++partition_checks, ++merge_checks;
      }
    }
    // Every symbol density integrates to one.
    for (const auto& s : c.model->vocabulary.symbols()) {
      const double integral = kde_integral(s.density, 20000, rng);
      worst_integral = std::max(worst_integral, std::abs(integral - 1.0));
      v.require(std::abs(integral - 1.0) <= 0.05, c.label + " " + s.name + ": density integral " + fmt(integral));
      ++densities;
    }
    // Linking rows are distributions.
    for (const auto& [key, row] : c.gm.linking.rows) {
      double sum = 0.0;
      for (const auto& e : row) sum += e.probability;
      worst_row = std::max(worst_row, std::abs(sum - 1.0));
      v.require(std::abs(sum - 1.0) <= 0.01, c.label + ": linking row sums to " + fmt(sum));
      ++rows;
    }
    // Plan probability never increases along a plan.
    const auto regions = c.env->regions();
    const std::size_t n_opts = c.env->options().size();
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t r = std::uniform_int_distribution<std::size_t>(0, regions.size() - 1)(rng);
      const BeliefState Z = belief_from_states(*c.env, region_sampler(*c.env, r), c.gm.labels, 64, std::uint64_t(trial));
      std::vector<OptionId> options;
      for (int k = 0; k < 4; ++k) options.push_back(OptionId(std::uniform_int_distribution<std::size_t>(0, n_opts - 1)(rng)));
      const Plan full = resolve_plan(c.gm, Z, options, {64, 11});
      // A zero-probability resolution may name partitions with no operator; such plans are undefined.
      try {
        plan_probability(c.gm, Z, full.steps, false, {64, 11});
      } catch (const MissingOperatorError&) {
        ++undefined;
        continue;
      }
      double prev = 1.0;
      for (std::size_t k = 0; k <= full.steps.size(); ++k) {
        const std::vector<PlanStep> prefix(full.steps.begin(), full.steps.begin() + std::ptrdiff_t(k));
        const double p = plan_probability(c.gm, Z, prefix, false, {64, 11});
        v.require(p <= prev + 1e-12, c.label + ": prefix probability increased");
        prev = p;
        ++prefixes;
      }
    }
  }
  const double secs = seconds_since(t0);
  v.require(secs < 300.0, "runtime under 5 minutes");
  v.detail << "  partition checks " << partition_checks << ", merge checks " << merge_checks << ", densities " << densities
           << " (worst |integral - 1| " << fmt(worst_integral) << "), linking rows " << rows << " (worst |sum - 1| "
           << fmt(worst_row, 6) << "), prefixes " << prefixes << " (plans without operators skipped: " << undefined
           << "), runtime " << fmt(secs, 1) << " s\n";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int criterion = 0;
  app.add_option("criterion", criterion, "Criterion number, 1 to 7")->required()->check(CLI::Range(1, 7));
  CLI11_PARSE(app, argc, argv);

  static const std::map<int, std::pair<const char*, std::function<Verdict()>>> kCriteria = {
      {1, {"corridor rule recovery", criterion_corridor_rules}},
      {2, {"plan probability matches rollouts", criterion_oracle_agreement}},
      {3, {"rod-and-block transfer", criterion_rodblock_transfer}},
      {4, {"treasure-maze transfer", criterion_treasure_transfer}},
      {5, {"transfer invariance", criterion_transfer_invariance}},
      {6, {"PPDDL round trip", criterion_ppddl}},
      {7, {"property suites", criterion_properties}},
  };
  const auto& [title, run] = kCriteria.at(criterion);
  Verdict v;
  try {
    v = run();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail << "  exception: " << e.what() << "\n";
  }
  std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << criterion << ": " << title << "\n" << v.detail.str();
  return v.pass ? 0 : 1;
}
