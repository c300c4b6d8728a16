#pragma once

#include "portsym/common.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace portsym {

/// One option execution, seen both in problem space and through the agent's sensors.
struct Transition {
  std::string task_id;
  Vector state;
  Vector obs;
  OptionId option_id = 0;
  bool success = false;
  Vector next_state;
  Vector next_obs;
  int duration = 1;
  double reward = 0.0;

  const Vector& start(Space s) const { return s == Space::Egocentric ? obs : state; }
  const Vector& end(Space s) const { return s == Space::Egocentric ? next_obs : next_state; }

  bool operator==(const Transition&) const = default;
};

struct OptionDescriptor {
  OptionId option_id = 0;
  std::string name;
  bool operator==(const OptionDescriptor&) const = default;
};

struct ExecutionResult {
  bool success = false;
  int duration = 1;
  double reward = 0.0;
};

/// A simulated task. Owns its dynamics RNG so that a (descriptor, seed) pair
/// fully determines every trajectory.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string family() const = 0;
  virtual std::string task_id() const = 0;
  virtual const std::vector<OptionDescriptor>& options() const = 0;
  virtual Index state_dim() const = 0;
  virtual Index obs_dim() const = 0;

  /// Per-dimension standard deviation of sensor noise on observations.
  virtual Vector obs_noise() const = 0;
  /// Per-dimension standard deviation of positional noise on problem-space states.
  virtual Vector state_noise() const = 0;

  /// Draws a state from the task's start distribution.
  virtual void reset() = 0;
  virtual const Vector& state() const = 0;
  virtual void set_state(const Vector& s) = 0;

  virtual bool can_execute(OptionId o) const = 0;
  /// Runs the option's controller to termination. Leaves the state untouched
  /// and reports failure when the initiation condition does not hold.
  virtual ExecutionResult execute(OptionId o) = 0;
  virtual Vector observe() = 0;

  virtual std::unique_ptr<Environment> clone() const = 0;

  // Analytic ground truth: the finite set of regions the dynamics rest in.
  virtual std::vector<Vector> regions() const = 0;
  virtual std::optional<std::size_t> region_of(const Vector& s) const = 0;
  virtual Vector sample_in_region(std::size_t region, Rng& rng) const = 0;

  void reseed(std::uint64_t seed) { rng_.seed(seed); }
  bool any_executable() const;
  std::string option_name(OptionId o) const;

 protected:
  Rng rng_{0};
};

struct Dataset {
  std::string domain_family;
  std::uint64_t rng_seed = 0;
  std::vector<Transition> transitions;

  Index state_dim() const { return transitions.empty() ? 0 : transitions.front().state.size(); }
  Index obs_dim() const { return transitions.empty() ? 0 : transitions.front().obs.size(); }
  std::size_t size() const { return transitions.size(); }
  bool empty() const { return transitions.empty(); }

  /// Throws ValidationError when any transition breaks a Transition invariant.
  void validate() const;

  bool operator==(const Dataset&) const = default;
};

enum class Exploration {
  /// Sample uniformly from all options; failed initiations are recorded.
  AllOptions,
  /// Sample uniformly from options whose initiation condition holds.
  ExecutableOnly,
};

struct CollectOptions {
  Exploration exploration = Exploration::AllOptions;
  /// Transitions between resets of the start distribution; 0 never resets.
  std::size_t episode_length = 0;
};

/// Incremental uniform-random exploration of one environment.
class Collector {
 public:
  Collector(const Environment& env, std::uint64_t seed, CollectOptions opts = {});

  /// Appends `count` transitions to `out`.
  void collect(std::size_t count, Dataset& out);

  const Environment& environment() const { return *env_; }

 private:
  std::unique_ptr<Environment> env_;
  Rng choice_rng_;
  CollectOptions opts_;
  std::size_t since_reset_ = 0;
};

/// Gathers exactly `budget` transitions from a fresh copy of `env`.
Dataset collect(const Environment& env, std::size_t budget, std::uint64_t seed,
                CollectOptions opts = {});

void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

std::string format_dataset(const Dataset& ds);
Dataset parse_dataset(const std::string& text);

/// Concatenates datasets from one domain family; task ids keep the records apart.
Dataset concatenate(const std::vector<const Dataset*>& parts);

}  // namespace portsym
