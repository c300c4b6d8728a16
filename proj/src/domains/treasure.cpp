#include "portsym/domains/treasure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#ifndef PORTSYM_DATA_DIR
#define PORTSYM_DATA_DIR "data"
#endif

namespace portsym {
namespace {

constexpr double kLeverOn = std::numbers::pi / 4.0;
constexpr double kMatch = 0.25;

bool is_door(char ch) { return (ch >= 'A' && ch <= 'G') || ch == 'X'; }
bool is_lever(char ch) { return ch >= 'a' && ch <= 'g'; }

}  // namespace

TreasureLevel parse_level(const std::string& text, const std::string& name) {
  TreasureLevel level;
  level.name = name;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  static const std::string kLegend = "#.H@XLK$ABCDEFGabcdefg";
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    for (std::size_t c = 0; c < line.size(); ++c)
      if (kLegend.find(line[c]) == std::string::npos)
        throw ParseError(name + ": unknown cell character '" + std::string(1, line[c]) + "'", lineno, c + 1);
    if (!level.rows.empty() && line.size() != level.rows.front().size())
      throw ParseError(name + ": row has " + std::to_string(line.size()) + " cells, expected " +
                           std::to_string(level.rows.front().size()),
                       lineno, 1);
    level.rows.push_back(line);
  }
  if (level.rows.empty()) throw ParseError(name + ": empty level", lineno, 0);
  return level;
}

std::filesystem::path default_level_dir() { return std::filesystem::path(PORTSYM_DATA_DIR) / "levels"; }

TreasureLevel load_level(int index, const std::filesystem::path& dir) {
  if (index < 0 || index >= kNumTreasureLevels)
    throw std::out_of_range("treasure level " + std::to_string(index) + " out of range; valid levels are 0.." +
                            std::to_string(kNumTreasureLevels - 1));
  const auto path = (dir.empty() ? default_level_dir() : dir) / ("level_" + std::to_string(index) + ".txt");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open level file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_level(buf.str(), "level_" + std::to_string(index));
}

TreasureEnvironment::TreasureEnvironment(TreasureLevel level, std::uint64_t seed, double jitter)
    : level_(std::move(level)), jitter_(jitter) {
  int starts = 0, keys = 0, locks = 0, treasures = 0;
  std::map<char, int> doors;
  std::map<char, int> lever_count;
  for (int r = 0; r < level_.height(); ++r) {
    for (int c = 0; c < level_.width(); ++c) {
      const char ch = level_.rows[std::size_t(r)][std::size_t(c)];
      if (ch == '@') ++starts, start_row_ = r, start_col_ = c;
      else if (ch == 'K') ++keys, key_row_ = r, key_col_ = c;
      else if (ch == 'L') ++locks, lock_row_ = r, lock_col_ = c;
      else if (ch == '$') ++treasures, treasure_row_ = r, treasure_col_ = c;
      else if (is_door(ch)) ++doors[ch];
      else if (is_lever(ch)) {
        ++lever_count[ch];
        levers_.push_back({r, c, char(ch - 'a' + 'A')});
      }
    }
  }
  const std::string where = level_.name + ": ";
  if (starts != 1) throw ValidationError(where + "exactly one start '@' required");
  if (treasures != 1) throw ValidationError(where + "exactly one treasure '$' required");
  if (keys > 1 || locks > 1) throw ValidationError(where + "at most one key and one lock allowed");
  for (const auto& [door, n] : doors) {
    (void)n;
    if (door == 'X') {
      if (keys != 1 || locks != 1) throw ValidationError(where + "door X needs exactly one lock and one key");
    } else if (lever_count[char(door - 'A' + 'a')] != 1) {
      throw ValidationError(where + "door " + std::string(1, door) + " needs exactly one lever");
    }
  }
  for (const auto& [lever, n] : lever_count)
    if (n != 1) throw ValidationError(where + "lever " + std::string(1, lever) + " appears more than once");
  std::sort(levers_.begin(), levers_.end(), [](const Lever& a, const Lever& b) { return a.door < b.door; });
  if (!treasure_reachable_when_unlocked()) throw ValidationError(where + "treasure unreachable with all doors open");

  reseed(seed);
  config_ = Config{start_row_, start_col_, 0, 0, false};
  state_ = encode(config_);
  build_regions();
}

const std::vector<OptionDescriptor>& TreasureEnvironment::options() const {
  static const std::vector<OptionDescriptor> kOptions = {
      {GoLeft, "GoLeft"}, {GoRight, "GoRight"}, {UpLadder, "UpLadder"}, {DownLadder, "DownLadder"}, {Interact, "Interact"}};
  return kOptions;
}

Vector TreasureEnvironment::state_noise() const {
  Vector n = Vector::Zero(state_dim());
  n[0] = n[1] = jitter_;
  for (std::size_t i = 0; i < levers_.size(); ++i) n[6 + Index(i)] = jitter_;
  return n;
}

char TreasureEnvironment::at(int r, int c) const {
  if (r < 0 || c < 0 || r >= level_.height() || c >= level_.width()) return '#';
  return level_.rows[std::size_t(r)][std::size_t(c)];
}

bool TreasureEnvironment::door_open(char ch, const Config& cfg) const {
  if (ch == 'X') return cfg.key == 2;
  for (std::size_t i = 0; i < levers_.size(); ++i)
    if (levers_[i].door == ch) return (cfg.levers >> i) & 1u;
  return false;
}

bool TreasureEnvironment::walkable(int r, int c, const Config& cfg) const {
  const char ch = at(r, c);
  if (ch == '#') return false;
  if (is_door(ch)) return door_open(ch, cfg);
  return true;
}

bool TreasureEnvironment::supported(int r, int c) const {
  const char below = at(r + 1, c);
  return below == '#' || below == 'H';
}

bool TreasureEnvironment::point_of_interest(int r, int c, const Config& cfg) const {
  const char ch = at(r, c);
  if (ch == 'H' || at(r + 1, c) == 'H' || is_lever(ch) || ch == 'L') return true;
  if (ch == 'K') return cfg.key == 0;
  if (ch == '$') return !cfg.treasure;
  return false;
}

std::optional<TreasureEnvironment::Config> TreasureEnvironment::successor(const Config& cfg, OptionId o) const {
  Config next = cfg;
  switch (o) {
    case GoLeft:
    case GoRight: {
      const int dc = o == GoLeft ? -1 : 1;
      int steps = 0;
      while (steps < kStepCap) {
        const int nc = next.col + dc;
        if (!walkable(next.row, nc, next) || !supported(next.row, nc)) break;
        next.col = nc;
        ++steps;
        if (point_of_interest(next.row, nc, next)) break;
      }
      if (steps >= kStepCap) throw std::logic_error("treasure walk exceeded its step cap");
      if (steps == 0) return std::nullopt;
      return next;
    }
    case UpLadder: {
      if (at(cfg.row, cfg.col) != 'H') return std::nullopt;
      int r = cfg.row;
      while (at(r - 1, cfg.col) == 'H') --r;
      if (!walkable(r - 1, cfg.col, cfg)) return std::nullopt;
      next.row = r - 1;
      return next;
    }
    case DownLadder: {
      if (at(cfg.row + 1, cfg.col) != 'H') return std::nullopt;
      int r = cfg.row + 1;
      while (at(r + 1, cfg.col) == 'H') ++r;
      next.row = r;
      return next;
    }
    case Interact: {
      const char ch = at(cfg.row, cfg.col);
      if (is_lever(ch)) {
        for (std::size_t i = 0; i < levers_.size(); ++i)
          if (levers_[i].row == cfg.row && levers_[i].col == cfg.col) next.levers ^= (1u << i);
        return next;
      }
      if (ch == 'K' && cfg.key == 0) return next.key = 1, next;
      if (ch == 'L' && cfg.key == 1) return next.key = 2, next;
      if (ch == '$' && !cfg.treasure) return next.treasure = true, next;
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

bool TreasureEnvironment::can_execute(OptionId o) const { return successor(config_, o).has_value(); }

ExecutionResult TreasureEnvironment::execute(OptionId o) {
  const auto next = successor(config_, o);
  if (!next) return {false, 1, 0.0};
  const int duration = 1 + std::abs(next->col - config_.col) + std::abs(next->row - config_.row);
  config_ = *next;
  state_ = jittered(config_, rng_);
  return {true, duration, 0.0};
}

Vector TreasureEnvironment::encode(const Config& cfg) const {
  Vector s(state_dim());
  const double h = double(level_.height());
  auto xy = [&](int r, int c) { return Eigen::Vector2d(c + 0.5, (h - 1.0 - r) + 0.5); };
  const Eigen::Vector2d agent = xy(cfg.row, cfg.col);
  const Eigen::Vector2d carried = agent + Eigen::Vector2d(0.0, 0.5);
  s.segment<2>(0) = agent;
  if (key_row_ < 0) s.segment<2>(2) = Eigen::Vector2d(-1.0, -1.0);
  else if (cfg.key == 0) s.segment<2>(2) = xy(key_row_, key_col_);
  else if (cfg.key == 1) s.segment<2>(2) = carried;
  else s.segment<2>(2) = xy(lock_row_, lock_col_);
  s.segment<2>(4) = cfg.treasure ? carried : xy(treasure_row_, treasure_col_);
  for (std::size_t i = 0; i < levers_.size(); ++i) s[6 + Index(i)] = ((cfg.levers >> i) & 1u) ? kLeverOn : -kLeverOn;
  s[state_dim() - 1] = cfg.key == 2 ? 1.0 : 0.0;
  return s;
}

Vector TreasureEnvironment::jittered(const Config& cfg, Rng& rng) const {
  std::normal_distribution<double> noise(0.0, jitter_);
  Vector s = encode(cfg);
  const Eigen::Vector2d d(noise(rng), noise(rng));
  s.segment<2>(0) += d;
  if (cfg.key == 1) s.segment<2>(2) += d;
  if (cfg.treasure) s.segment<2>(4) += d;
  for (std::size_t i = 0; i < levers_.size(); ++i) s[6 + Index(i)] += noise(rng);
  return s;
}

TreasureEnvironment::Config TreasureEnvironment::decode(const Vector& s) const {
  if (s.size() != state_dim()) throw std::invalid_argument("treasure: state has wrong dimension");
  Config cfg;
  cfg.col = int(std::floor(s[0]));
  cfg.row = level_.height() - 1 - int(std::floor(s[1]));
  const Eigen::Vector2d carried = s.segment<2>(0) + Eigen::Vector2d(0.0, 0.5);
  if (key_row_ >= 0) {
    if (s[state_dim() - 1] > 0.5) cfg.key = 2;
    else if ((s.segment<2>(2) - carried).norm() < kMatch) cfg.key = 1;
  }
  const Eigen::Vector2d home(treasure_col_ + 0.5, level_.height() - 1.0 - treasure_row_ + 0.5);
  cfg.treasure = (s.segment<2>(4) - home).norm() >= kMatch;
  for (std::size_t i = 0; i < levers_.size(); ++i)
    if (s[6 + Index(i)] > 0) cfg.levers |= (1u << i);
  return cfg;
}

void TreasureEnvironment::set_state(const Vector& s) {
  config_ = decode(s);
  state_ = s;
}

int TreasureEnvironment::cell_code(int r, int c, const Config& cfg) const {
  const char ch = at(r, c);
  if (ch == '#') return Solid;
  if (ch == 'H') return Ladder;
  if (is_door(ch)) return door_open(ch, cfg) ? DoorOpen : DoorClosed;
  if (is_lever(ch)) {
    for (std::size_t i = 0; i < levers_.size(); ++i)
      if (levers_[i].row == r && levers_[i].col == c) return ((cfg.levers >> i) & 1u) ? LeverOn : LeverOff;
  }
  if (ch == 'K') return cfg.key == 0 ? KeyCell : Empty;
  if (ch == 'L') return cfg.key == 2 ? LockUnlocked : LockLocked;
  if (ch == '$') return cfg.treasure ? Empty : TreasureCell;
  return Empty;
}

Vector TreasureEnvironment::observation_of(const Config& cfg) const {
  Vector o(11);
  int k = 0;
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc) o[k++] = cell_code(cfg.row + dr, cfg.col + dc, cfg);
  o[9] = cfg.key == 1 ? 1.0 : 0.0;
  o[10] = cfg.treasure ? 1.0 : 0.0;
  return o;
}

Vector TreasureEnvironment::observe() { return observation_of(config_); }

std::unique_ptr<Environment> TreasureEnvironment::clone() const {
  return std::make_unique<TreasureEnvironment>(*this);
}

std::uint64_t TreasureEnvironment::pack(const Config& c) const {
  return (std::uint64_t(c.row) << 48) | (std::uint64_t(c.col) << 32) | (std::uint64_t(c.levers) << 3) |
         (std::uint64_t(c.key) << 1) | std::uint64_t(c.treasure);
}

void TreasureEnvironment::build_regions() {
  const Config start{start_row_, start_col_, 0, 0, false};
  std::deque<Config> frontier{start};
  region_index_[pack(start)] = 0;
  regions_.push_back(start);
  while (!frontier.empty()) {
    const Config c = frontier.front();
    frontier.pop_front();
    for (const auto& d : options()) {
      const auto next = successor(c, d.option_id);
      if (!next) continue;
      if (region_index_.emplace(pack(*next), regions_.size()).second) {
        regions_.push_back(*next);
        frontier.push_back(*next);
      }
    }
  }
}

bool TreasureEnvironment::treasure_reachable_when_unlocked() const {
  // Cell-level flood fill over walking and ladder moves with every door open.
  Config open{start_row_, start_col_, ~0u, 2, false};
  std::set<std::pair<int, int>> seen{{start_row_, start_col_}};
  std::deque<std::pair<int, int>> frontier{{start_row_, start_col_}};
  while (!frontier.empty()) {
    const auto [r, c] = frontier.front();
    frontier.pop_front();
    if (r == treasure_row_ && c == treasure_col_) return true;
    open.row = r, open.col = c;
    for (OptionId o : {GoLeft, GoRight, UpLadder, DownLadder}) {
      const auto next = successor(open, o);
      if (next && seen.insert({next->row, next->col}).second) frontier.push_back({next->row, next->col});
    }
  }
  return false;
}

void TreasureEnvironment::reset() {
  std::uniform_int_distribution<std::size_t> pick(0, regions_.size() - 1);
  config_ = regions_[pick(rng_)];
  state_ = jittered(config_, rng_);
}

std::vector<Vector> TreasureEnvironment::regions() const {
  std::vector<Vector> out;
  out.reserve(regions_.size());
  for (const Config& c : regions_) out.push_back(encode(c));
  return out;
}

std::optional<std::size_t> TreasureEnvironment::region_of(const Vector& s) const {
  if (s.size() != state_dim()) return std::nullopt;
  const auto it = region_index_.find(pack(decode(s)));
  if (it == region_index_.end()) return std::nullopt;
  return it->second;
}

Vector TreasureEnvironment::sample_in_region(std::size_t region, Rng& rng) const {
  if (region >= regions_.size()) throw std::out_of_range("treasure: region index out of range");
  return jittered(regions_[region], rng);
}

}  // namespace portsym
