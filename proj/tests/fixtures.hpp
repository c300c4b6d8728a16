#pragma once

#include "portsym/harness.hpp"

#include <memory>

namespace portsym::testing {

/// Corridor pipeline at the documented defaults, built once per process.
struct CorridorFixture {
  std::unique_ptr<Environment> env;
  Dataset data;
  std::shared_ptr<const PortableModel> model;
  GroundedModel grounded;
};

inline const CorridorFixture& corridor_fixture() {
  static const CorridorFixture fx = [] {
    CorridorFixture f;
    f.env = make_corridor({0.0, 0.0}, 0);
    f.data = collect(*f.env, 2000, 0);
    f.model = std::make_shared<const PortableModel>(learn_portable(f.data, default_learn_params(*f.env, Space::Egocentric)));
    f.grounded = ground(f.model, f.data, nullptr);
    return f;
  }();
  return fx;
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(Index(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

/// Transition whose observation equals its state.
inline Transition flat_transition(const Vector& s, OptionId o, bool success, const Vector& next) {
  Transition t;
  t.task_id = "synthetic";
  t.state = s;
  t.obs = s;
  t.option_id = o;
  t.success = success;
  t.next_state = success ? next : s;
  t.next_obs = t.next_state;
  return t;
}

/// Option 0 from around the origin lands at one of `ends` with the given
/// weights; failures are recorded far away so the precondition has negatives.
inline Dataset branching_dataset(const std::vector<Vector>& ends, const std::vector<double>& weights, std::size_t n,
                                 std::uint64_t seed) {
  Dataset ds;
  ds.domain_family = "synthetic";
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  auto jitter = [&](Vector v) {
    for (Index i = 0; i < v.size(); ++i) v[i] += noise(rng);
    return v;
  };
  for (std::size_t i = 0; i < n; ++i)
    ds.transitions.push_back(flat_transition(jitter(Vector::Zero(2)), 0, true, jitter(ends[pick(rng)])));
  for (std::size_t i = 0; i < n / 4; ++i) {
    const Vector far = jitter(vec({3.0, 3.0}));
    ds.transitions.push_back(flat_transition(far, 0, false, far));
  }
  return ds;
}

inline LearnParams flat_learn_params() {
  LearnParams p;
  p.symbols.noise = Vector::Constant(2, 0.01);
  p.option_names = {"Jump"};
  return p;
}

}  // namespace portsym::testing
