#pragma once

#include "portsym/domains/corridor.hpp"
#include "portsym/domains/rod_block.hpp"
#include "portsym/domains/treasure.hpp"

#include <map>

namespace portsym {

/// Family-specific task parameters as key/value strings:
///   corridor: offset_x, offset_y, angle, noise
///   rodblock: blocks=<kind>@<pos>;... or num_blocks + layout_seed
///   treasure: level
using TaskDescriptor = std::map<std::string, std::string>;

const std::vector<std::string>& domain_families();

/// Parses "key=value,key=value".
TaskDescriptor parse_descriptor(const std::string& text);
std::string format_descriptor(const TaskDescriptor& d);

std::unique_ptr<Environment> make_environment(const std::string& family, const TaskDescriptor& descriptor,
                                              std::uint64_t seed = 0);

std::unique_ptr<Environment> make_corridor(const Eigen::Vector2d& offset, std::uint64_t seed = 0);
std::unique_ptr<Environment> make_rod_block(int num_blocks, std::uint64_t seed = 0);
std::unique_ptr<Environment> make_treasure(int level_index, std::uint64_t seed = 0);

/// The task sequence used by transfer experiments.
std::vector<TaskDescriptor> experiment_tasks(const std::string& family, std::size_t num_tasks, std::uint64_t seed);

}  // namespace portsym
