#pragma once

#include "portsym/core.hpp"

namespace portsym {

enum class BlockKind { Down = 0, Up = 1, Both = 2 };

const char* to_string(BlockKind k);

struct Block {
  double position = 0.0;
  BlockKind kind = BlockKind::Both;
};

/// A rod on a horizontal track between two walls. The rod points down
/// (theta = 0) or up (theta = pi); a block of kind Down impedes it only while it
/// points down, Up only while it points up, Both always.
struct RodBlockTask {
  double track_length = 10.0;
  std::vector<Block> blocks;
  double rod_length = 1.0;
  double gap = 0.25;
  double proximity = 1.0;
  double motion_noise = 0.01;
  double sensor_noise = 0.01;
};

/// 1 <= num_blocks <= 4 blocks at random positions and kinds.
RodBlockTask random_rod_block_task(int num_blocks, std::uint64_t seed);

class RodBlockEnvironment final : public Environment {
 public:
  enum OptionIndex : OptionId {
    GoLeft = 0,
    GoRight = 1,
    RotateUpClockwise = 2,
    RotateUpAnticlockwise = 3,
    RotateDownClockwise = 4,
    RotateDownAnticlockwise = 5,
  };
  /// Neighbour codes of the observation's one-hot blocks.
  enum Neighbour : int { None = 0, Wall = 1, BlocksDown = 2, BlocksUp = 3, BlocksBoth = 4 };
  static constexpr int kNumNeighbourTypes = 5;
  static constexpr int kStepCap = 10000;

  explicit RodBlockEnvironment(RodBlockTask task, std::uint64_t seed = 0);

  std::string family() const override { return "rodblock"; }
  std::string task_id() const override;
  const std::vector<OptionDescriptor>& options() const override;
  Index state_dim() const override { return 2; }
  Index obs_dim() const override { return 2 * kNumNeighbourTypes + 1; }
  Vector obs_noise() const override;
  Vector state_noise() const override { return Vector::Constant(2, task_.motion_noise); }

  void reset() override;
  const Vector& state() const override { return state_; }
  void set_state(const Vector& s) override;
  bool can_execute(OptionId o) const override;
  ExecutionResult execute(OptionId o) override;
  Vector observe() override;
  std::unique_ptr<Environment> clone() const override;

  /// Rest states: each side of each obstacle, rod down or up.
  std::vector<Vector> regions() const override;
  std::optional<std::size_t> region_of(const Vector& s) const override;
  Vector sample_in_region(std::size_t region, Rng& rng) const override;

  const RodBlockTask& task() const { return task_; }
  /// Noise-free observation at a state.
  Vector observation_at(const Vector& s) const;

 private:
  struct Obstacle {
    double position;
    Neighbour type;
  };
  bool impedes(const Obstacle& ob, bool up) const;
  std::optional<double> translation_target(bool left) const;
  bool sweep_clear(bool left) const;

  RodBlockTask task_;
  std::vector<Obstacle> obstacles_;  // sorted by position, walls included
  Vector state_;
};

}  // namespace portsym
