#pragma once

#include "portsym/core.hpp"

#include <filesystem>
#include <unordered_map>

namespace portsym {

/// Level legend, one character per cell:
///   '#' solid   '.' empty   'H' ladder   '@' start (empty)
///   'A'..'G' door opened by lever 'a'..'g'
///   'X' door opened by unlocking lock 'L' with key 'K'
///   '$' treasure
struct TreasureLevel {
  std::string name;
  std::vector<std::string> rows;

  int height() const { return int(rows.size()); }
  int width() const { return rows.empty() ? 0 : int(rows.front().size()); }
};

constexpr int kNumTreasureLevels = 10;

TreasureLevel parse_level(const std::string& text, const std::string& name = "level");
/// Loads one of the shipped levels, 0 <= index < kNumTreasureLevels.
TreasureLevel load_level(int index, const std::filesystem::path& dir = {});
std::filesystem::path default_level_dir();

class TreasureEnvironment final : public Environment {
 public:
  enum OptionIndex : OptionId { GoLeft = 0, GoRight = 1, UpLadder = 2, DownLadder = 3, Interact = 4 };
  enum CellCode : int {
    Empty = 0,
    Solid = 1,
    Ladder = 2,
    DoorClosed = 3,
    DoorOpen = 4,
    LeverOff = 5,
    LeverOn = 6,
    KeyCell = 7,
    LockLocked = 8,
    LockUnlocked = 9,
    TreasureCell = 10,
  };
  static constexpr int kStepCap = 1000;

  /// Discrete configuration underlying the continuous state.
  struct Config {
    int row = 0;
    int col = 0;
    std::uint32_t levers = 0;  // bit i set: lever i on
    int key = 0;               // 0 on the floor, 1 carried, 2 used on the lock
    bool treasure = false;
    bool operator==(const Config&) const = default;
  };

  explicit TreasureEnvironment(TreasureLevel level, std::uint64_t seed = 0, double jitter = 0.01);

  std::string family() const override { return "treasure"; }
  std::string task_id() const override { return "treasure(" + level_.name + ")"; }
  const std::vector<OptionDescriptor>& options() const override;
  Index state_dim() const override { return 7 + Index(levers_.size()); }
  Index obs_dim() const override { return 11; }
  Vector obs_noise() const override { return Vector::Zero(11); }
  Vector state_noise() const override;

  void reset() override;
  const Vector& state() const override { return state_; }
  void set_state(const Vector& s) override;
  bool can_execute(OptionId o) const override;
  ExecutionResult execute(OptionId o) override;
  Vector observe() override;
  std::unique_ptr<Environment> clone() const override;

  /// Every configuration reachable from the start under the option dynamics.
  std::vector<Vector> regions() const override;
  std::optional<std::size_t> region_of(const Vector& s) const override;
  Vector sample_in_region(std::size_t region, Rng& rng) const override;

  const TreasureLevel& level() const { return level_; }
  Config config() const { return config_; }
  Config decode(const Vector& s) const;
  /// Noise-free state vector of a configuration.
  Vector encode(const Config& c) const;
  Vector observation_of(const Config& c) const;
  std::optional<Config> successor(const Config& c, OptionId o) const;
  bool treasure_reachable_when_unlocked() const;

 private:
  struct Lever {
    int row, col;
    char door;
  };

  char at(int r, int c) const;
  bool door_open(char ch, const Config& c) const;
  bool walkable(int r, int c, const Config& cfg) const;
  bool supported(int r, int c) const;
  bool point_of_interest(int r, int c, const Config& cfg) const;
  int cell_code(int r, int c, const Config& cfg) const;
  Vector jittered(const Config& c, Rng& rng) const;
  std::uint64_t pack(const Config& c) const;
  void build_regions();

  TreasureLevel level_;
  double jitter_;
  std::vector<Lever> levers_;
  int start_row_ = 0, start_col_ = 0;
  int key_row_ = -1, key_col_ = -1;
  int lock_row_ = -1, lock_col_ = -1;
  int treasure_row_ = -1, treasure_col_ = -1;
  std::vector<Config> regions_;
  std::unordered_map<std::uint64_t, std::size_t> region_index_;
  Config config_;
  Vector state_;
};

}  // namespace portsym
