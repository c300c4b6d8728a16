#pragma once

#include "portsym/domains/registry.hpp"
#include "portsym/plan.hpp"

#include <filesystem>

namespace portsym {

enum class Condition {
  /// Portable rules accumulate across tasks; each task learns labels and linking.
  Portable,
  /// Every task learns its own rules in problem space.
  TaskSpecific,
};
const char* to_string(Condition c);
Condition parse_condition(const std::string& text);

struct ExperimentConfig {
  std::string family = "rodblock";
  std::size_t num_tasks = 10;
  std::size_t sample_step = 250;
  double threshold = 0.75;
  std::size_t goals_per_task = 100;
  std::size_t permutations = 100;
  Condition condition = Condition::Portable;
  std::uint64_t seed = 0;
  /// Sampling rounds per task before the task is recorded at the cap.
  std::size_t max_steps = 20;
  /// Belief particles per plan evaluation.
  std::size_t particles = 32;
  /// Exploration resets to the start distribution after this many transitions.
  std::size_t episode_length = 50;

  /// Throws std::invalid_argument on non-positive counts or a threshold outside (0, 1].
  void validate() const;
};

struct CurvePoint {
  int task = 1;
  double cumulative_samples = 0.0;
  double standard_error = 0.0;
  bool operator==(const CurvePoint&) const = default;
};

struct ExperimentResult {
  std::vector<CurvePoint> curve;
  /// Samples used per task position (post-permutation), one row per permutation.
  std::vector<std::vector<std::size_t>> samples;
  std::vector<std::string> warnings;
  /// Mean over permutations of the samples used at each task position.
  std::vector<double> mean_per_task() const;
};

/// A two-option evaluation plan from the simulator's ground truth.
struct EvaluationPlan {
  std::size_t start_region = 0;
  std::size_t goal_region = 0;
  OptionId first = 0;
  OptionId second = 0;
};

/// Plans whose goal region is exactly two option executions from the start
/// region, drawn uniformly over (start, goal) pairs.
std::vector<EvaluationPlan> sample_evaluation_plans(const Environment& env, std::size_t count, std::uint64_t seed);

/// Defaults used by experiments and the CLI for one family and learning space.
LearnParams default_learn_params(const Environment& env, Space space);
GroundParams default_ground_params(const std::string& family);

/// Mean over plans of the model's two-step likelihood.
double mean_plan_likelihood(const GroundedModel& gm, const Environment& env, const std::vector<EvaluationPlan>& plans,
                            bool problem_space, std::size_t particles, std::uint64_t seed);

ExperimentResult run_transfer_experiment(const ExperimentConfig& cfg);

/// CSV columns: task,mean_cumulative_samples,stderr.
void write_curve(const std::vector<CurvePoint>& points, const std::filesystem::path& path);
std::vector<CurvePoint> read_curve(const std::filesystem::path& path);
std::string format_curve(const std::vector<CurvePoint>& points);
std::vector<CurvePoint> parse_curve(const std::string& text);

struct PlotSeries {
  std::string label;
  std::vector<CurvePoint> points;
};
/// SVG line plot; each series gets a shaded band of one standard error.
std::string render_svg(const std::vector<PlotSeries>& series, const std::string& title = "");
void render_plot(const std::vector<CurvePoint>& points, const std::filesystem::path& path);
void render_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& path);

}  // namespace portsym
