#pragma once

#include "portsym/core.hpp"

#include <array>

namespace portsym {

/// Ring of radius `radius` with two diametrically opposite junctions: the wall
/// junction at `junction_angle` and the window junction opposite it. Each
/// junction has one radial corridor of length `corridor_length` ending in a
/// dead-end. Everything is translated by `offset`.
struct CorridorTask {
  double radius = 1.0;
  double junction_angle = 0.0;
  double corridor_length = 1.0;
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
  double motion_noise = 0.01;
  double sensor_noise = 0.01;
};

class CorridorEnvironment final : public Environment {
 public:
  enum OptionIndex : OptionId { Clockwise = 0, Anticlockwise = 1, Outward = 2, Inward = 3 };
  enum Place : std::size_t { WallJunction = 0, WindowJunction = 1, WallDeadEnd = 2, WindowDeadEnd = 3 };
  static constexpr std::size_t kNumPlaces = 4;
  static constexpr int kStepCap = 1000;

  explicit CorridorEnvironment(CorridorTask task, std::uint64_t seed = 0);

  std::string family() const override { return "corridor"; }
  std::string task_id() const override;
  const std::vector<OptionDescriptor>& options() const override;
  Index state_dim() const override { return 2; }
  Index obs_dim() const override { return 4; }
  Vector obs_noise() const override { return Vector::Constant(4, task_.sensor_noise); }
  Vector state_noise() const override { return Vector::Constant(2, task_.motion_noise); }

  void reset() override;
  const Vector& state() const override { return state_; }
  void set_state(const Vector& s) override;
  bool can_execute(OptionId o) const override;
  ExecutionResult execute(OptionId o) override;
  Vector observe() override;
  std::unique_ptr<Environment> clone() const override;

  std::vector<Vector> regions() const override;
  std::optional<std::size_t> region_of(const Vector& s) const override;
  Vector sample_in_region(std::size_t region, Rng& rng) const override;

  const CorridorTask& task() const { return task_; }
  Eigen::Vector2d place_position(Place p) const;
  /// Noise-free (front, back, left, right) clearance reading at a place.
  static Vector prototype(Place p);

 private:
  std::optional<Place> place_of(const Vector& s) const;

  CorridorTask task_;
  Vector state_;
};

/// Nearest observation prototype: the held-out decoder for corridor observations.
CorridorEnvironment::Place decode_corridor_obs(const Eigen::Ref<const Vector>& obs);

}  // namespace portsym
