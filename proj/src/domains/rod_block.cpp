#include "portsym/domains/rod_block.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace portsym {
namespace {

constexpr double kUp = std::numbers::pi;
constexpr double kAdjacentSlack = 0.1;
constexpr double kStepLength = 0.1;
constexpr int kRotationSteps = 5;

bool is_up(double theta) { return std::abs(theta - kUp) < std::abs(theta); }

}  // namespace

const char* to_string(BlockKind k) {
  switch (k) {
    case BlockKind::Down: return "bd";
    case BlockKind::Up: return "bu";
    default: return "bb";
  }
}

RodBlockTask random_rod_block_task(int num_blocks, std::uint64_t seed) {
  if (num_blocks < 1 || num_blocks > 4)
    throw std::invalid_argument("rodblock: num_blocks must be in 1..4, got " + std::to_string(num_blocks));
  RodBlockTask task;
  Rng rng(seed);
  const double lo = 1.5, hi = task.track_length - 1.5, min_sep = 2.0;
  // Sorted uniform slack plus fixed separations: uniform over valid layouts.
  const double slack = (hi - lo) - min_sep * (num_blocks - 1);
  std::uniform_real_distribution<double> pos(0.0, slack);
  std::uniform_int_distribution<int> kind(0, 2);
  std::vector<double> u(static_cast<std::size_t>(num_blocks));
  for (auto& x : u) x = pos(rng);
  std::sort(u.begin(), u.end());
  for (int i = 0; i < num_blocks; ++i) task.blocks.push_back({lo + u[std::size_t(i)] + min_sep * i, BlockKind(kind(rng))});
  std::sort(task.blocks.begin(), task.blocks.end(),
            [](const Block& a, const Block& b) { return a.position < b.position; });
  return task;
}

RodBlockEnvironment::RodBlockEnvironment(RodBlockTask task, std::uint64_t seed) : task_(std::move(task)) {
  if (task_.blocks.empty() || task_.blocks.size() > 4)
    throw std::invalid_argument("rodblock: between 1 and 4 blocks required");
  obstacles_.push_back({0.0, Wall});
  for (const Block& b : task_.blocks) {
    if (!(b.position > task_.rod_length && b.position < task_.track_length - task_.rod_length))
      throw std::invalid_argument("rodblock: block position must lie strictly inside the walls");
    obstacles_.push_back({b.position, Neighbour(int(BlocksDown) + int(b.kind))});
  }
  obstacles_.push_back({task_.track_length, Wall});
  std::sort(obstacles_.begin(), obstacles_.end(), [](const Obstacle& a, const Obstacle& b) { return a.position < b.position; });
  for (std::size_t i = 1; i < obstacles_.size(); ++i)
    if (obstacles_[i].position - obstacles_[i - 1].position <= task_.rod_length)
      throw std::invalid_argument("rodblock: obstacles must be more than one rod length apart");
  reseed(seed);
  state_ = (Vector(2) << task_.gap, 0.0).finished();
}

std::string RodBlockEnvironment::task_id() const {
  std::ostringstream os;
  os << "rodblock(";
  for (std::size_t i = 0; i < task_.blocks.size(); ++i)
    os << (i ? ";" : "") << to_string(task_.blocks[i].kind) << "@" << task_.blocks[i].position;
  os << ")";
  return os.str();
}

const std::vector<OptionDescriptor>& RodBlockEnvironment::options() const {
  static const std::vector<OptionDescriptor> kOptions = {
      {GoLeft, "GoLeft"},
      {GoRight, "GoRight"},
      {RotateUpClockwise, "RotateUpClockwise"},
      {RotateUpAnticlockwise, "RotateUpAnticlockwise"},
      {RotateDownClockwise, "RotateDownClockwise"},
      {RotateDownAnticlockwise, "RotateDownAnticlockwise"},
  };
  return kOptions;
}

Vector RodBlockEnvironment::obs_noise() const {
  Vector n = Vector::Zero(obs_dim());
  n[obs_dim() - 1] = task_.sensor_noise;
  return n;
}

bool RodBlockEnvironment::impedes(const Obstacle& ob, bool up) const {
  switch (ob.type) {
    case Wall:
    case BlocksBoth: return true;
    case BlocksDown: return !up;
    case BlocksUp: return up;
    default: return false;
  }
}

std::optional<double> RodBlockEnvironment::translation_target(bool left) const {
  const double x = state_[0];
  const bool up = is_up(state_[1]);
  const Obstacle* nearest = nullptr;
  for (const Obstacle& ob : obstacles_) {
    if (!impedes(ob, up)) continue;
    const bool on_side = left ? ob.position < x : ob.position > x;
    if (!on_side) continue;
    if (!nearest || std::abs(ob.position - x) < std::abs(nearest->position - x)) nearest = &ob;
  }
  if (!nearest) return std::nullopt;
  if (std::abs(nearest->position - x) <= task_.gap + kAdjacentSlack) return std::nullopt;
  return nearest->position + (left ? task_.gap : -task_.gap);
}

bool RodBlockEnvironment::sweep_clear(bool left) const {
  const double x = state_[0];
  return std::none_of(obstacles_.begin(), obstacles_.end(), [&](const Obstacle& ob) {
    const double d = left ? x - ob.position : ob.position - x;
    return d > 0 && d <= task_.rod_length;
  });
}

void RodBlockEnvironment::reset() {
  const std::size_t n = 4 * (obstacles_.size() - 1);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  state_ = sample_in_region(pick(rng_), rng_);
}

void RodBlockEnvironment::set_state(const Vector& s) {
  if (s.size() != 2) throw std::invalid_argument("rodblock: state must have 2 entries");
  state_ = s;
}

bool RodBlockEnvironment::can_execute(OptionId o) const {
  const bool up = is_up(state_[1]);
  switch (o) {
    case GoLeft: return translation_target(true).has_value();
    case GoRight: return translation_target(false).has_value();
    // Pointing down, clockwise swings the tip to the left; pointing up, to the right.
    case RotateUpClockwise: return !up && sweep_clear(true);
    case RotateUpAnticlockwise: return !up && sweep_clear(false);
    case RotateDownClockwise: return up && sweep_clear(false);
    case RotateDownAnticlockwise: return up && sweep_clear(true);
    default: return false;
  }
}

ExecutionResult RodBlockEnvironment::execute(OptionId o) {
  if (!can_execute(o)) return {false, 1, 0.0};
  std::normal_distribution<double> noise(0.0, task_.motion_noise);
  int steps = 0;
  if (o == GoLeft || o == GoRight) {
    const double target = *translation_target(o == GoLeft);
    for (double walked = 0.0; walked < std::abs(target - state_[0]) && steps < kStepCap; walked += kStepLength)
      ++steps;
    if (steps >= kStepCap) throw std::logic_error("rodblock controller exceeded its step cap");
    state_[0] = target + noise(rng_);
    state_[1] = (is_up(state_[1]) ? kUp : 0.0) + noise(rng_);
  } else {
    steps = kRotationSteps;
    const bool to_up = o == RotateUpClockwise || o == RotateUpAnticlockwise;
    state_[0] += noise(rng_);
    state_[1] = (to_up ? kUp : 0.0) + noise(rng_);
  }
  return {true, std::max(steps, 1), 0.0};
}

Vector RodBlockEnvironment::observation_at(const Vector& s) const {
  Vector o = Vector::Zero(obs_dim());
  int left = None, right = None;
  double dl = task_.proximity, dr = task_.proximity;
  for (const Obstacle& ob : obstacles_) {
    const double d = ob.position - s[0];
    if (d < 0 && -d <= dl) dl = -d, left = ob.type;
    if (d > 0 && d <= dr) dr = d, right = ob.type;
  }
  o[left] = 1.0;
  o[kNumNeighbourTypes + right] = 1.0;
  o[obs_dim() - 1] = s[1];
  return o;
}

Vector RodBlockEnvironment::observe() {
  Vector o = observation_at(state_);
  std::normal_distribution<double> noise(0.0, task_.sensor_noise);
  o[obs_dim() - 1] += noise(rng_);
  return o;
}

std::unique_ptr<Environment> RodBlockEnvironment::clone() const {
  return std::make_unique<RodBlockEnvironment>(*this);
}

std::vector<Vector> RodBlockEnvironment::regions() const {
  // Order: for each gap between consecutive obstacles, its left and right ends, down then up.
  std::vector<Vector> out;
  for (std::size_t i = 0; i + 1 < obstacles_.size(); ++i) {
    for (double x : {obstacles_[i].position + task_.gap, obstacles_[i + 1].position - task_.gap})
      for (double th : {0.0, kUp}) out.push_back((Vector(2) << x, th).finished());
  }
  return out;
}

std::optional<std::size_t> RodBlockEnvironment::region_of(const Vector& s) const {
  const auto rs = regions();
  for (std::size_t r = 0; r < rs.size(); ++r)
    if (std::abs(s[0] - rs[r][0]) <= kAdjacentSlack && std::abs(s[1] - rs[r][1]) <= 0.5) return r;
  return std::nullopt;
}

Vector RodBlockEnvironment::sample_in_region(std::size_t region, Rng& rng) const {
  const auto rs = regions();
  if (region >= rs.size()) throw std::out_of_range("rodblock: region index out of range");
  std::normal_distribution<double> noise(0.0, task_.motion_noise);
  Vector s = rs[region];
  s[0] += noise(rng);
  s[1] += noise(rng);
  return s;
}

}  // namespace portsym
