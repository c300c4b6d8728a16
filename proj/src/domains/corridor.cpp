#include "portsym/domains/corridor.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace portsym {
namespace {

constexpr double kPlaceTolerance = 0.25;
constexpr double kStepLength = 0.05;

}  // namespace

CorridorEnvironment::CorridorEnvironment(CorridorTask task, std::uint64_t seed) : task_(std::move(task)) {
  if (!(task_.radius > 0) || !(task_.corridor_length > 0))
    throw std::invalid_argument("corridor: radius and corridor length must be positive");
  reseed(seed);
  state_ = place_position(WallJunction);
}

std::string CorridorEnvironment::task_id() const {
  std::ostringstream os;
  os << "corridor(offset=" << task_.offset.x() << ";" << task_.offset.y() << ",angle=" << task_.junction_angle << ")";
  return os.str();
}

const std::vector<OptionDescriptor>& CorridorEnvironment::options() const {
  static const std::vector<OptionDescriptor> kOptions = {
      {Clockwise, "Clockwise"}, {Anticlockwise, "Anticlockwise"}, {Outward, "Outward"}, {Inward, "Inward"}};
  return kOptions;
}

Eigen::Vector2d CorridorEnvironment::place_position(Place p) const {
  const bool window = p == WindowJunction || p == WindowDeadEnd;
  const bool dead_end = p == WallDeadEnd || p == WindowDeadEnd;
  const double angle = task_.junction_angle + (window ? std::numbers::pi : 0.0);
  const double r = task_.radius + (dead_end ? task_.corridor_length : 0.0);
  return task_.offset + r * Eigen::Vector2d(std::cos(angle), std::sin(angle));
}

Vector CorridorEnvironment::prototype(Place p) {
  // Illumination through the windows brightens every reading by half.
  switch (p) {
    case WallJunction: return (Vector(4) << 1.0, 0.2, 1.0, 1.0).finished();
    case WindowJunction: return (Vector(4) << 1.5, 0.3, 1.5, 1.5).finished();
    default: return (Vector(4) << 0.1, 1.0, 0.1, 0.1).finished();
  }
}

CorridorEnvironment::Place decode_corridor_obs(const Eigen::Ref<const Vector>& obs) {
  using E = CorridorEnvironment;
  E::Place best = E::WallJunction;
  double best_d = std::numeric_limits<double>::infinity();
  for (auto p : {E::WallJunction, E::WindowJunction, E::WallDeadEnd}) {
    const double d = (obs - E::prototype(p)).squaredNorm();
    if (d < best_d) best_d = d, best = p;
  }
  return best;
}

std::optional<CorridorEnvironment::Place> CorridorEnvironment::place_of(const Vector& s) const {
  for (std::size_t p = 0; p < kNumPlaces; ++p)
    if ((s - place_position(Place(p))).norm() <= kPlaceTolerance) return Place(p);
  return std::nullopt;
}

void CorridorEnvironment::reset() {
  std::uniform_int_distribution<std::size_t> pick(0, kNumPlaces - 1);
  state_ = sample_in_region(pick(rng_), rng_);
}

void CorridorEnvironment::set_state(const Vector& s) {
  if (s.size() != 2) throw std::invalid_argument("corridor: state must have 2 entries");
  state_ = s;
}

bool CorridorEnvironment::can_execute(OptionId o) const {
  const auto place = place_of(state_);
  if (!place) return false;
  const bool junction = *place == WallJunction || *place == WindowJunction;
  switch (o) {
    case Clockwise:
    case Anticlockwise:
    case Outward: return junction;
    case Inward: return !junction;
    default: return false;
  }
}

ExecutionResult CorridorEnvironment::execute(OptionId o) {
  if (!can_execute(o)) return {false, 1, 0.0};
  const Place from = *place_of(state_);
  Place to = from;
  switch (o) {
    case Clockwise:
    case Anticlockwise: to = from == WallJunction ? WindowJunction : WallJunction; break;
    case Outward: to = from == WallJunction ? WallDeadEnd : WindowDeadEnd; break;
    case Inward: to = from == WallDeadEnd ? WallJunction : WindowJunction; break;
  }

  // Ring moves sweep half the circumference; corridor moves walk the straight segment.
  const Eigen::Vector2d goal = place_position(to);
  const double path = (o == Clockwise || o == Anticlockwise) ? std::numbers::pi * task_.radius
                                                              : (goal - state_).norm();
  int steps = 0;
  for (double walked = 0.0; walked < path && steps < kStepCap; walked += kStepLength) ++steps;
  if (steps >= kStepCap) throw std::logic_error("corridor controller exceeded its step cap");
  steps = std::max(steps, 1);
  std::normal_distribution<double> noise(0.0, task_.motion_noise);
  state_ = goal;
  state_[0] += noise(rng_);
  state_[1] += noise(rng_);
  return {true, steps, 0.0};
}

Vector CorridorEnvironment::observe() {
  const auto place = place_of(state_);
  Vector o = prototype(place ? *place : decode_corridor_obs(Vector::Zero(4)));
  std::normal_distribution<double> noise(0.0, task_.sensor_noise);
  for (Index i = 0; i < o.size(); ++i) o[i] += noise(rng_);
  return o;
}

std::unique_ptr<Environment> CorridorEnvironment::clone() const {
  return std::make_unique<CorridorEnvironment>(*this);
}

std::vector<Vector> CorridorEnvironment::regions() const {
  std::vector<Vector> out;
  for (std::size_t p = 0; p < kNumPlaces; ++p) out.push_back(place_position(Place(p)));
  return out;
}

std::optional<std::size_t> CorridorEnvironment::region_of(const Vector& s) const {
  const auto p = place_of(s);
  if (!p) return std::nullopt;
  return std::size_t(*p);
}

Vector CorridorEnvironment::sample_in_region(std::size_t region, Rng& rng) const {
  if (region >= kNumPlaces) throw std::out_of_range("corridor: region index out of range");
  std::normal_distribution<double> noise(0.0, task_.motion_noise);
  Vector s = place_position(Place(region));
  s[0] += noise(rng);
  s[1] += noise(rng);
  return s;
}

}  // namespace portsym
