#include "portsym/harness.hpp"

#include "portsym/model_io.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace portsym {

const char* to_string(Condition c) { return c == Condition::Portable ? "portable" : "task"; }

Condition parse_condition(const std::string& text) {
  if (text == "portable") return Condition::Portable;
  if (text == "task" || text == "task-specific") return Condition::TaskSpecific;
  throw std::invalid_argument("unknown condition '" + text + "' (expected portable or task)");
}

void ExperimentConfig::validate() const {
  const auto& fams = domain_families();
  if (std::find(fams.begin(), fams.end(), family) == fams.end())
    throw std::invalid_argument("unknown domain family '" + family + "'");
  if (num_tasks == 0 || sample_step == 0 || goals_per_task == 0 || permutations == 0 || max_steps == 0 ||
      particles == 0)
    throw std::invalid_argument("experiment counts must be positive");
  if (!(threshold > 0 && threshold <= 1)) throw std::invalid_argument("threshold must lie in (0, 1]");
}

std::vector<double> ExperimentResult::mean_per_task() const {
  if (samples.empty()) return {};
  std::vector<double> mean(samples.front().size(), 0.0);
  for (const auto& row : samples)
    for (std::size_t k = 0; k < row.size(); ++k) mean[k] += double(row[k]) / double(samples.size());
  return mean;
}

namespace {

constexpr std::size_t kProbes = 3;

// Successor regions of each (region, option); empty when any probe fails to initiate.
std::vector<std::vector<std::set<std::size_t>>> region_graph(const Environment& env, std::uint64_t seed) {
  auto sim = env.clone();
  sim->reseed(derive_seed(seed, 1));
  Rng rng(seed);
  const std::size_t n = env.regions().size();
  const std::size_t m = env.options().size();
  std::vector<std::vector<std::set<std::size_t>>> g(n, std::vector<std::set<std::size_t>>(m));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t o = 0; o < m; ++o) {
      std::set<std::size_t> next;
      bool ok = true;
      for (std::size_t k = 0; k < kProbes && ok; ++k) {
        sim->set_state(env.sample_in_region(r, rng));
        ok = sim->execute(OptionId(o)).success;
        const auto land = ok ? sim->region_of(sim->state()) : std::nullopt;
        if (ok && land) next.insert(*land);
        ok = ok && land.has_value();
      }
      if (ok) g[r][o] = std::move(next);
    }
  }
  return g;
}

}  // namespace

std::vector<EvaluationPlan> sample_evaluation_plans(const Environment& env, std::size_t count, std::uint64_t seed) {
  const auto g = region_graph(env, derive_seed(seed, 3));
  const std::size_t n = g.size();
  // Deterministic single-successor edges only, so every chosen plan succeeds in the simulator.
  auto succ = [&](std::size_t r, std::size_t o) -> std::optional<std::size_t> {
    if (g[r][o].size() != 1) return std::nullopt;
    return *g[r][o].begin();
  };
  std::map<std::pair<std::size_t, std::size_t>, std::vector<EvaluationPlan>> by_pair;
  for (std::size_t r = 0; r < n; ++r) {
    std::set<std::size_t> one_step;
    for (std::size_t o = 0; o < g[r].size(); ++o)
      for (auto s : g[r][o]) one_step.insert(s);
    for (std::size_t o1 = 0; o1 < g[r].size(); ++o1) {
      const auto mid = succ(r, o1);
      if (!mid || *mid == r) continue;
      for (std::size_t o2 = 0; o2 < g[*mid].size(); ++o2) {
        const auto end = succ(*mid, o2);
        if (!end || *end == r || one_step.count(*end)) continue;
        by_pair[{r, *end}].push_back({r, *end, OptionId(o1), OptionId(o2)});
      }
    }
  }
  if (by_pair.empty()) throw ValidationError(env.task_id() + ": no two-step plans in the region graph");
  std::vector<const std::vector<EvaluationPlan>*> pairs;
  for (const auto& [key, plans] : by_pair) pairs.push_back(&plans);
  Rng rng(seed);
  std::vector<EvaluationPlan> out;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& plans = *pairs[std::uniform_int_distribution<std::size_t>(0, pairs.size() - 1)(rng)];
    out.push_back(plans[std::uniform_int_distribution<std::size_t>(0, plans.size() - 1)(rng)]);
  }
  return out;
}

LearnParams default_learn_params(const Environment& env, Space space) {
  LearnParams p;
  if (space == Space::Problem) {
    p.partition.eps = 0.02;
    p.symbols.noise = env.state_noise();
  } else {
    const std::string f = env.family();
    p.partition.eps = f == "corridor" ? 0.1 : f == "rodblock" ? 0.02 : 0.03;
    p.symbols.noise = env.obs_noise();
  }
  for (const auto& d : env.options()) {
    if (p.option_names.size() <= std::size_t(d.option_id)) p.option_names.resize(std::size_t(d.option_id) + 1);
    p.option_names[std::size_t(d.option_id)] = d.name;
  }
  return p;
}

GroundParams default_ground_params(const std::string&) { return GroundParams{}; }

double mean_plan_likelihood(const GroundedModel& gm, const Environment& env, const std::vector<EvaluationPlan>& plans,
                            bool problem_space, std::size_t particles, std::uint64_t seed) {
  if (plans.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& plan = plans[i];
    const StateSampler sampler = [&env, r = plan.start_region](Rng& rng) { return env.sample_in_region(r, rng); };
    const BeliefState Z = belief_from_states(env, sampler, gm.labels, particles, derive_seed(seed, i), problem_space);
    PlanParams pp;
    pp.particles = particles;
    pp.seed = derive_seed(seed, i, 1);
    total += resolve_plan(gm, Z, {plan.first, plan.second}, pp).probability;
  }
  return total / double(plans.size());
}

ExperimentResult run_transfer_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto tasks = experiment_tasks(cfg.family, cfg.num_tasks, cfg.seed);
  std::vector<std::unique_ptr<Environment>> envs;
  std::vector<std::vector<EvaluationPlan>> plans;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    envs.push_back(make_environment(cfg.family, tasks[t], derive_seed(cfg.seed, 10, t)));
    plans.push_back(sample_evaluation_plans(*envs.back(), cfg.goals_per_task, derive_seed(cfg.seed, 11, t)));
  }
  const GroundParams gp = default_ground_params(cfg.family);
  CollectOptions copts;
  copts.episode_length = cfg.episode_length;

  ExperimentResult result;
  for (std::size_t p = 0; p < cfg.permutations; ++p) {
    std::vector<std::size_t> order(tasks.size());
    std::iota(order.begin(), order.end(), 0);
    Rng perm_rng(derive_seed(cfg.seed, 12, p));
    std::shuffle(order.begin(), order.end(), perm_rng);

    Dataset experience;
    experience.domain_family = cfg.family;
    std::vector<std::size_t> used_per_task;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const Environment& env = *envs[order[k]];
      const std::uint64_t task_seed = derive_seed(cfg.seed, 13 + p, k);
      Collector collector(env, task_seed, copts);
      Dataset current;
      current.domain_family = cfg.family;
      const Space space = cfg.condition == Condition::Portable ? Space::Egocentric : Space::Problem;
      LearnParams lp = default_learn_params(env, space);
      lp.symbols.seed = task_seed;
      bool reached = false;
      std::size_t step = 0;
      while (step < cfg.max_steps && !reached) {
        collector.collect(cfg.sample_step, current);
        ++step;
        double likelihood = 0.0;
        try {
          if (cfg.condition == Condition::Portable) {
            const Dataset pooled = concatenate({&experience, &current});
            auto model = std::make_shared<const PortableModel>(learn_portable(pooled, lp));
            const GroundedModel gm = ground(model, current, nullptr, gp);
            likelihood = mean_plan_likelihood(gm, env, plans[order[k]], false, cfg.particles, task_seed);
          } else {
            auto model = std::make_shared<const PortableModel>(learn_portable(problem_space_view(current), lp));
            const GroundedModel gm = ground_trivially(model, nullptr, gp);
            likelihood = mean_plan_likelihood(gm, env, plans[order[k]], true, cfg.particles, task_seed);
          }
        } catch (const InsufficientDataError&) {
          likelihood = 0.0;
        }
        reached = likelihood > cfg.threshold;
      }
      if (!reached)
        result.warnings.push_back("permutation " + std::to_string(p) + " task " + env.task_id() + ": no model above " +
                                  "threshold after " + std::to_string(cfg.max_steps) + " steps");
      used_per_task.push_back(step * cfg.sample_step);
      if (cfg.condition == Condition::Portable) experience = concatenate({&experience, &current});
    }
    result.samples.push_back(std::move(used_per_task));
  }

  const double P = double(cfg.permutations);
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    std::vector<double> cum;
    for (const auto& row : result.samples)
      cum.push_back(double(std::accumulate(row.begin(), row.begin() + std::ptrdiff_t(k + 1), std::size_t(0))));
    const double mean = std::accumulate(cum.begin(), cum.end(), 0.0) / P;
    double var = 0.0;
    for (double c : cum) var += (c - mean) * (c - mean);
    const double se = cfg.permutations > 1 ? std::sqrt(var / (P - 1.0)) / std::sqrt(P) : 0.0;
    result.curve.push_back({int(k + 1), mean, se});
  }
  return result;
}

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

std::string format_curve(const std::vector<CurvePoint>& points) {
  std::string out = "task,mean_cumulative_samples,stderr\n";
  for (const auto& p : points)
    out += std::to_string(p.task) + "," + shortest(p.cumulative_samples) + "," + shortest(p.standard_error) + "\n";
  return out;
}

std::vector<CurvePoint> parse_curve(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<CurvePoint> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "task,mean_cumulative_samples,stderr") throw ParseError("curve: unexpected header '" + line + "'", 1);
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (cells.size() != 3) throw ParseError("curve: expected 3 columns", lineno);
    CurvePoint p;
    auto num = [&](const std::string& c, auto& v) {
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size()) throw ParseError("curve: bad number '" + c + "'", lineno);
    };
    num(cells[0], p.task);
    num(cells[1], p.cumulative_samples);
    num(cells[2], p.standard_error);
    out.push_back(p);
  }
  if (lineno == 0) throw ParseError("curve: empty file", 0);
  return out;
}

void write_curve(const std::vector<CurvePoint>& points, const std::filesystem::path& path) {
  if (points.empty()) throw std::invalid_argument("write_curve: no points");
  write_text_file(path, format_curve(points));
}

std::vector<CurvePoint> read_curve(const std::filesystem::path& path) { return parse_curve(read_text_file(path)); }

}  // namespace portsym
