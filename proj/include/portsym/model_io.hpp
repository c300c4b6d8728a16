#pragma once

// JSON documents for learned artefacts. Every document carries a "format" tag
// and a "version"; the schemas are listed in the README.

#include "portsym/ground.hpp"

#include <filesystem>

namespace portsym {

std::string format_portable_model(const PortableModel& model);
PortableModel parse_portable_model(const std::string& text);
void save_portable_model(const PortableModel& model, const std::filesystem::path& path);
PortableModel load_portable_model(const std::filesystem::path& path);

std::string format_grounded_model(const GroundedModel& gm);
GroundedModel parse_grounded_model(const std::string& text);
void save_grounded_model(const GroundedModel& gm, const std::filesystem::path& path);
GroundedModel load_grounded_model(const std::filesystem::path& path);

struct PartitionFile {
  Space space = Space::Egocentric;
  std::vector<Partition> partitions;
};
std::string format_partitions(const PartitionFile& file);
PartitionFile parse_partitions(const std::string& text);

/// Problem-space states labelled in or out of the goal.
std::string format_goals(const GoalSamples& goals);
GoalSamples parse_goals(const std::string& text);

/// Start particles: problem-space states with their egocentric observations.
struct StartSamples {
  Matrix states;
  Matrix observations;
};
std::string format_starts(const StartSamples& starts);
StartSamples parse_starts(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace portsym
