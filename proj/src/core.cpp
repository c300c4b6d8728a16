#include "portsym/core.hpp"

#include <algorithm>

namespace portsym {

Space parse_space(const std::string& text) {
  if (text == "ego" || text == "egocentric") return Space::Egocentric;
  if (text == "problem") return Space::Problem;
  throw std::invalid_argument("unknown space '" + text + "' (expected ego or problem)");
}

bool Environment::any_executable() const {
  const auto& opts = options();
  return std::any_of(opts.begin(), opts.end(),
                     [this](const OptionDescriptor& d) { return can_execute(d.option_id); });
}

std::string Environment::option_name(OptionId o) const {
  for (const auto& d : options())
    if (d.option_id == o) return d.name;
  return "option" + std::to_string(o);
}

void Dataset::validate() const {
  if (transitions.empty()) return;
  const Index sd = transitions.front().state.size();
  const Index od = transitions.front().obs.size();
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const Transition& t = transitions[i];
    const std::string where = "transition " + std::to_string(i) + ": ";
    if (t.state.size() != sd || t.next_state.size() != sd)
      throw ValidationError(where + "state dimension differs from " + std::to_string(sd));
    if (t.obs.size() != od || t.next_obs.size() != od)
      throw ValidationError(where + "obs dimension differs from " + std::to_string(od));
    if (t.duration < 1) throw ValidationError(where + "duration must be positive");
    if (!t.success && (t.next_state != t.state || t.next_obs != t.obs))
      throw ValidationError(where + "failed execution changed the state");
  }
}

Collector::Collector(const Environment& env, std::uint64_t seed, CollectOptions opts)
    : env_(env.clone()), choice_rng_(derive_seed(seed, 1)), opts_(opts) {
  env_->reseed(derive_seed(seed, 2));
  env_->reset();
}

void Collector::collect(std::size_t count, Dataset& out) {
  const auto& descriptors = env_->options();
  std::vector<OptionId> candidates;
  candidates.reserve(descriptors.size());
  std::size_t gathered = 0;
  while (gathered < count) {
    if (!env_->any_executable() || (opts_.episode_length && since_reset_ >= opts_.episode_length)) {
      env_->reset();
      since_reset_ = 0;
      continue;
    }
    candidates.clear();
    for (const auto& d : descriptors)
      if (opts_.exploration == Exploration::AllOptions || env_->can_execute(d.option_id))
        candidates.push_back(d.option_id);
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    const OptionId o = candidates[pick(choice_rng_)];

    Transition t;
    t.task_id = env_->task_id();
    t.state = env_->state();
    t.obs = env_->observe();
    t.option_id = o;
    const ExecutionResult r = env_->execute(o);
    t.success = r.success;
    t.duration = r.duration;
    t.reward = r.reward;
    if (r.success) {
      t.next_state = env_->state();
      t.next_obs = env_->observe();
    } else {
      t.next_state = t.state;
      t.next_obs = t.obs;
    }
    out.transitions.push_back(std::move(t));
    ++gathered;
    ++since_reset_;
  }
}

Dataset collect(const Environment& env, std::size_t budget, std::uint64_t seed,
                CollectOptions opts) {
  Dataset ds;
  ds.domain_family = env.family();
  ds.rng_seed = seed;
  ds.transitions.reserve(budget);
  Collector collector(env, seed, opts);
  collector.collect(budget, ds);
  return ds;
}

Dataset concatenate(const std::vector<const Dataset*>& parts) {
  Dataset out;
  std::size_t total = 0;
  for (const Dataset* p : parts) total += p->size();
  out.transitions.reserve(total);
  for (const Dataset* p : parts) {
    if (out.domain_family.empty()) {
      out.domain_family = p->domain_family;
      out.rng_seed = p->rng_seed;
    } else if (!p->domain_family.empty() && p->domain_family != out.domain_family) {
      throw ValidationError("cannot concatenate datasets of families '" + out.domain_family +
                            "' and '" + p->domain_family + "'");
    }
    if (!out.transitions.empty() && !p->empty() && p->obs_dim() != out.obs_dim())
      throw ValidationError("observation dimension differs across datasets");
    out.transitions.insert(out.transitions.end(), p->transitions.begin(), p->transitions.end());
  }
  return out;
}

}  // namespace portsym
