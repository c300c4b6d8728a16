#include "portsym/domains/registry.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace portsym {
namespace {

double get_double(const TaskDescriptor& d, const std::string& key, double fallback) {
  const auto it = d.find(key);
  if (it == d.end()) return fallback;
  double v = 0;
  const auto [p, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
  if (ec != std::errc() || p != it->second.data() + it->second.size())
    throw std::invalid_argument("task descriptor: '" + key + "' is not a number: " + it->second);
  return v;
}

long get_int(const TaskDescriptor& d, const std::string& key, long fallback) {
  const double v = get_double(d, key, double(fallback));
  if (v != std::floor(v)) throw std::invalid_argument("task descriptor: '" + key + "' must be an integer");
  return long(v);
}

BlockKind parse_kind(const std::string& s) {
  if (s == "bd") return BlockKind::Down;
  if (s == "bu") return BlockKind::Up;
  if (s == "bb") return BlockKind::Both;
  throw std::invalid_argument("unknown block kind '" + s + "' (expected bd, bu or bb)");
}

}  // namespace

const std::vector<std::string>& domain_families() {
  static const std::vector<std::string> kFamilies = {"corridor", "rodblock", "treasure"};
  return kFamilies;
}

TaskDescriptor parse_descriptor(const std::string& text) {
  TaskDescriptor d;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("task descriptor entry '" + item + "' is not key=value");
    d[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return d;
}

std::string format_descriptor(const TaskDescriptor& d) {
  std::string out;
  for (const auto& [k, v] : d) out += (out.empty() ? "" : ",") + k + "=" + v;
  return out;
}

std::unique_ptr<Environment> make_environment(const std::string& family, const TaskDescriptor& d,
                                              std::uint64_t seed) {
  if (family == "corridor") {
    CorridorTask task;
    task.offset = Eigen::Vector2d(get_double(d, "offset_x", 0.0), get_double(d, "offset_y", 0.0));
    task.junction_angle = get_double(d, "angle", 0.0);
    task.motion_noise = task.sensor_noise = get_double(d, "noise", 0.01);
    return std::make_unique<CorridorEnvironment>(task, seed);
  }
  if (family == "rodblock") {
    RodBlockTask task;
    if (const auto it = d.find("blocks"); it != d.end()) {
      std::istringstream in(it->second);
      std::string item;
      while (std::getline(in, item, ';')) {
        const auto at = item.find('@');
        if (at == std::string::npos) throw std::invalid_argument("block entry '" + item + "' is not kind@position");
        task.blocks.push_back({get_double({{"p", item.substr(at + 1)}}, "p", 0.0), parse_kind(item.substr(0, at))});
      }
    } else {
      task = random_rod_block_task(int(get_int(d, "num_blocks", 2)), std::uint64_t(get_int(d, "layout_seed", 0)));
    }
    task.motion_noise = task.sensor_noise = get_double(d, "noise", 0.01);
    return std::make_unique<RodBlockEnvironment>(task, seed);
  }
  if (family == "treasure") {
    return std::make_unique<TreasureEnvironment>(load_level(int(get_int(d, "level", 0))), seed,
                                                 get_double(d, "noise", 0.01));
  }
  throw std::invalid_argument("unknown domain family '" + family + "' (expected corridor, rodblock or treasure)");
}

std::unique_ptr<Environment> make_corridor(const Eigen::Vector2d& offset, std::uint64_t seed) {
  CorridorTask task;
  task.offset = offset;
  return std::make_unique<CorridorEnvironment>(task, seed);
}

std::unique_ptr<Environment> make_rod_block(int num_blocks, std::uint64_t seed) {
  return std::make_unique<RodBlockEnvironment>(random_rod_block_task(num_blocks, seed), seed);
}

std::unique_ptr<Environment> make_treasure(int level_index, std::uint64_t seed) {
  return std::make_unique<TreasureEnvironment>(load_level(level_index), seed);
}

std::vector<TaskDescriptor> experiment_tasks(const std::string& family, std::size_t num_tasks, std::uint64_t seed) {
  std::vector<TaskDescriptor> tasks;
  Rng rng(derive_seed(seed, 0x7a5c));
  for (std::size_t i = 0; i < num_tasks; ++i) {
    if (family == "corridor") {
      std::uniform_real_distribution<double> off(-5.0, 5.0);
      const double x = off(rng), y = off(rng);
      tasks.push_back({{"offset_x", std::to_string(x)}, {"offset_y", std::to_string(y)}});
    } else if (family == "rodblock") {
      std::uniform_int_distribution<int> n(1, 4);
      const int blocks = n(rng);
      tasks.push_back({{"num_blocks", std::to_string(blocks)}, {"layout_seed", std::to_string(derive_seed(seed, i) % 1000000)}});
    } else if (family == "treasure") {
      tasks.push_back({{"level", std::to_string(i % kNumTreasureLevels)}});
    } else {
      throw std::invalid_argument("unknown domain family '" + family + "'");
    }
  }
  return tasks;
}

}  // namespace portsym
