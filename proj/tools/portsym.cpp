// Command-line front end. Every subcommand also reads its flags from an
// INI/TOML file passed with --config (section named after the subcommand).

#include "portsym/harness.hpp"
#include "portsym/model_io.hpp"
#include "portsym/ppddl.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

using namespace portsym;

namespace {

Vector parse_noise(const std::string& text, Index dim) {
  return Vector::Constant(dim, std::stod(text));
}

std::unique_ptr<Environment> family_environment(const std::string& family) {
  return make_environment(family, {}, 0);
}

std::vector<std::size_t> parse_region_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) out.push_back(std::stoul(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"portsym: portable symbol learning, grounding and planning"};
  app.set_config("--config", "", "INI/TOML file supplying flag values");
  app.require_subcommand(1);

  // collect
  std::string domain = "corridor", task, out, in;
  std::size_t budget = 1000, episode_length = 0;
  std::uint64_t seed = 0;
  bool executable_only = false;
  auto* collect_cmd = app.add_subcommand("collect", "Gather option executions from one task");
  collect_cmd->add_option("--domain", domain, "corridor | rodblock | treasure")->required();
  collect_cmd->add_option("--task", task, "task descriptor key=value,...");
  collect_cmd->add_option("--budget", budget, "transitions to record")->required();
  collect_cmd->add_option("--seed", seed);
  collect_cmd->add_option("--episode-length", episode_length, "reset after this many transitions (0 = never)");
  collect_cmd->add_flag("--executable-only", executable_only, "sample only options whose initiation holds");
  collect_cmd->add_option("--out", out)->required();

  // partition
  std::string space = "ego";
  double eps = -1.0;
  std::size_t min_samples = 5;
  auto* part_cmd = app.add_subcommand("partition", "Partition options into subgoal options");
  part_cmd->add_option("--in", in)->required();
  part_cmd->add_option("--space", space, "ego | problem");
  part_cmd->add_option("--eps", eps, "DBSCAN radius in range-scaled units");
  part_cmd->add_option("--min-samples", min_samples);
  part_cmd->add_option("--out", out)->required();

  // learn-portable
  std::string append_model, noise;
  auto* learn_cmd = app.add_subcommand("learn-portable", "Learn portable symbols and rules");
  learn_cmd->add_option("--in", in)->required();
  learn_cmd->add_option("--append-model", append_model, "accumulate onto this model's experience");
  learn_cmd->add_option("--eps", eps);
  learn_cmd->add_option("--min-samples", min_samples);
  learn_cmd->add_option("--noise", noise, "sensor noise sigma for every observation variable");
  learn_cmd->add_option("--seed", seed);
  learn_cmd->add_option("--out", out)->required();

  // ground
  std::string model_path, goals_path;
  auto* ground_cmd = app.add_subcommand("ground", "Ground a portable model in one task");
  ground_cmd->add_option("--model", model_path)->required();
  ground_cmd->add_option("--in", in, "task dataset")->required();
  ground_cmd->add_option("--goals", goals_path, "goal file");
  ground_cmd->add_option("--seed", seed);
  ground_cmd->add_option("--out", out)->required();

  // emit-ppddl
  std::string grounded_path;
  auto* emit_cmd = app.add_subcommand("emit-ppddl", "Write a PPDDL domain");
  auto* emit_grounded = emit_cmd->add_option("--grounded", grounded_path, "grounded model");
  emit_cmd->add_option("--model", model_path, "portable model (lifted domain)")->excludes(emit_grounded);
  emit_cmd->add_option("--out", out)->required();

  // plan
  std::string start_path;
  std::size_t max_depth = 4, particles = 256;
  double prob_floor = 0.75;
  auto* plan_cmd = app.add_subcommand("plan", "Search for a plan and print it as JSON");
  plan_cmd->add_option("--grounded", grounded_path)->required();
  plan_cmd->add_option("--start", start_path, "start file")->required();
  plan_cmd->add_option("--goals", goals_path, "goal file (replaces the grounded goal)");
  plan_cmd->add_option("--max-depth", max_depth);
  plan_cmd->add_option("--prob-floor", prob_floor);
  plan_cmd->add_option("--particles", particles);
  plan_cmd->add_option("--seed", seed);

  // samples: start and goal files from a simulator
  std::string regions;
  std::size_t count = 200;
  auto* starts_cmd = app.add_subcommand("starts", "Write a start file sampled from simulator regions");
  starts_cmd->add_option("--domain", domain)->required();
  starts_cmd->add_option("--task", task);
  starts_cmd->add_option("--regions", regions, "comma-separated region indices")->required();
  starts_cmd->add_option("--count", count);
  starts_cmd->add_option("--seed", seed);
  starts_cmd->add_option("--out", out)->required();
  auto* goals_cmd = app.add_subcommand("goals", "Write a goal file labelling states of all regions");
  goals_cmd->add_option("--domain", domain)->required();
  goals_cmd->add_option("--task", task);
  goals_cmd->add_option("--regions", regions, "comma-separated goal region indices")->required();
  goals_cmd->add_option("--count", count, "states per region");
  goals_cmd->add_option("--seed", seed);
  goals_cmd->add_option("--out", out)->required();
  auto* regions_cmd = app.add_subcommand("regions", "List a task's analytic regions");
  regions_cmd->add_option("--domain", domain)->required();
  regions_cmd->add_option("--task", task);

  // experiment
  ExperimentConfig cfg;
  std::string condition = "portable", out_csv, out_plot;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a transfer experiment");
  exp_cmd->add_option("--domain", cfg.family)->required();
  exp_cmd->add_option("--condition", condition, "portable | task");
  exp_cmd->add_option("--permutations", cfg.permutations);
  exp_cmd->add_option("--tasks", cfg.num_tasks);
  exp_cmd->add_option("--sample-step", cfg.sample_step);
  exp_cmd->add_option("--threshold", cfg.threshold);
  exp_cmd->add_option("--goals", cfg.goals_per_task);
  exp_cmd->add_option("--max-steps", cfg.max_steps);
  exp_cmd->add_option("--particles", cfg.particles);
  exp_cmd->add_option("--episode-length", cfg.episode_length);
  exp_cmd->add_option("--seed", cfg.seed);
  exp_cmd->add_option("--out-csv", out_csv)->required();
  exp_cmd->add_option("--out-plot", out_plot);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*collect_cmd) {
      auto env = make_environment(domain, parse_descriptor(task), seed);
      CollectOptions opts;
      opts.exploration = executable_only ? Exploration::ExecutableOnly : Exploration::AllOptions;
      opts.episode_length = episode_length;
      Dataset ds = collect(*env, budget, seed, opts);
      save_dataset(ds, out);
    } else if (*part_cmd) {
      const Dataset ds = load_dataset(in);
      PartitionFile file;
      file.space = parse_space(space);
      PartitionParams pp;
      pp.eps = eps > 0 ? eps : default_learn_params(*family_environment(ds.domain_family), file.space).partition.eps;
      pp.min_samples = min_samples;
      file.partitions = partition_options(ds, file.space, pp, fit_space_scaling(ds, file.space));
      write_text_file(out, format_partitions(file));
    } else if (*learn_cmd) {
      Dataset ds = load_dataset(in);
      if (!append_model.empty()) {
        const PortableModel prior = load_portable_model(append_model);
        ds = concatenate({&prior.experience, &ds});
      }
      auto env = family_environment(ds.domain_family);
      LearnParams lp = default_learn_params(*env, Space::Egocentric);
      if (eps > 0) lp.partition.eps = eps;
      lp.partition.min_samples = lp.symbols.min_samples = min_samples;
      if (!noise.empty()) lp.symbols.noise = parse_noise(noise, ds.obs_dim());
      lp.symbols.seed = seed;
      const PortableModel model = learn_portable(ds, lp);
      save_portable_model(model, out);
      std::cerr << model.vocabulary.size() << " symbols, " << model.rules.size() << " rules\n";
    } else if (*ground_cmd) {
      auto model = std::make_shared<const PortableModel>(load_portable_model(model_path));
      const Dataset ds = load_dataset(in);
      std::optional<GoalSamples> goals;
      if (!goals_path.empty()) goals = parse_goals(read_text_file(goals_path));
      GroundParams gp = default_ground_params(model->family);
      gp.seed = seed;
      const GroundedModel gm = ground(model, ds, goals ? &*goals : nullptr, gp);
      for (const auto& w : gm.warnings) std::cerr << "warning: " << w << "\n";
      save_grounded_model(gm, out);
    } else if (*emit_cmd) {
      if (!grounded_path.empty()) write_text_file(out, emit_ppddl(load_grounded_model(grounded_path), "portable"));
      else if (!model_path.empty()) write_text_file(out, emit_ppddl(load_portable_model(model_path), "portable"));
      else throw std::invalid_argument("emit-ppddl needs --grounded or --model");
    } else if (*plan_cmd) {
      GroundedModel gm = load_grounded_model(grounded_path);
      if (!goals_path.empty()) {
        const GoalSamples goals = parse_goals(read_text_file(goals_path));
        fit_goal(gm, &goals, default_ground_params(gm.portable->family));
      }
      if (!gm.goal) throw std::invalid_argument("no goal: pass --goals or ground with one");
      const StartSamples starts = parse_starts(read_text_file(start_path));
      BeliefState Z;
      for (Index i = 0; i < starts.states.rows(); ++i) {
        Z.particles.push_back(gm.labels.trivial ? Vector(starts.states.row(i).transpose())
                                                : Vector(starts.observations.row(i).transpose()));
        Z.labels.push_back(gm.labels.assign(starts.states.row(i).transpose()));
      }
      Z.weights = Vector::Constant(starts.states.rows(), 1.0 / double(std::max<Index>(1, starts.states.rows())));
      PlanParams pp;
      pp.particles = particles;
      pp.seed = seed;
      const auto plan = search_plan(gm, Z, max_depth, prob_floor, pp);
      nlohmann::json rec = {{"found", plan.has_value()}};
      if (plan) {
        nlohmann::json steps = nlohmann::json::array();
        for (const auto& s : plan->steps) {
          const PortableRule* r = gm.portable->find_rule(s.option_id, s.partition);
          steps.push_back({{"option_id", s.option_id}, {"option", r ? r->option_name : ""}, {"partition", s.partition}});
        }
        rec["steps"] = steps;
        rec["probability"] = plan->probability;
      }
      std::cout << rec.dump(1) << "\n";
      return plan ? 0 : 2;
    } else if (*starts_cmd || *goals_cmd || *regions_cmd) {
      auto env = make_environment(domain, parse_descriptor(task), seed);
      const auto all = env->regions();
      if (*regions_cmd) {
        for (std::size_t r = 0; r < all.size(); ++r) {
          std::cout << r;
          for (Index i = 0; i < all[r].size(); ++i) std::cout << " " << all[r][i];
          std::cout << "\n";
        }
        return 0;
      }
      const auto chosen = parse_region_list(regions);
      for (auto r : chosen)
        if (r >= all.size()) throw std::invalid_argument("region " + std::to_string(r) + " out of range");
      Rng rng(seed);
      if (*starts_cmd) {
        StartSamples s{Matrix(Index(count), env->state_dim()), Matrix(Index(count), env->obs_dim())};
        for (std::size_t i = 0; i < count; ++i) {
          env->set_state(env->sample_in_region(chosen[i % chosen.size()], rng));
          s.states.row(Index(i)) = env->state().transpose();
          s.observations.row(Index(i)) = env->observe().transpose();
        }
        write_text_file(out, format_starts(s));
      } else {
        GoalSamples g{Matrix(Index(count * all.size()), env->state_dim()), {}};
        for (std::size_t r = 0; r < all.size(); ++r)
          for (std::size_t i = 0; i < count; ++i) {
            g.states.row(Index(r * count + i)) = env->sample_in_region(r, rng).transpose();
            g.in_goal.push_back(std::find(chosen.begin(), chosen.end(), r) != chosen.end());
          }
        write_text_file(out, format_goals(g));
      }
    } else if (*exp_cmd) {
      cfg.condition = parse_condition(condition);
      const ExperimentResult r = run_transfer_experiment(cfg);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
      write_curve(r.curve, out_csv);
      if (!out_plot.empty()) render_plot(std::vector<PlotSeries>{{to_string(cfg.condition), r.curve}}, out_plot);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
