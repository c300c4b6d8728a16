#pragma once

#include "portsym/core.hpp"
#include "portsym/stats.hpp"

namespace portsym {

enum class NoisePolicy {
  /// Each DBSCAN noise point joins the cluster of its nearest clustered effect.
  AttachNearest,
  Discard,
};

struct PartitionParams {
  /// Neighbourhood radius in range-scaled units.
  double eps = 0.1;
  std::size_t min_samples = 5;
  double overlap_threshold = 0.1;
  NoisePolicy noise = NoisePolicy::AttachNearest;
  /// Start vectors compared per partition when scoring overlap.
  std::size_t overlap_cap = 300;
};

/// Successful executions of one option from one class of start states.
/// `outcomes` are the effect clusters it was built from; `members` is their union.
struct Partition {
  OptionId option_id = 0;
  int index = 0;
  Space space = Space::Egocentric;
  std::vector<std::size_t> members;
  std::vector<std::vector<std::size_t>> outcomes;

  bool operator==(const Partition&) const = default;
};

/// Range scaling over every start and end vector of the dataset in `space`.
RangeScaling fit_space_scaling(const Dataset& ds, Space space);

Matrix start_matrix(const Dataset& ds, const std::vector<std::size_t>& idx, Space space);
Matrix end_matrix(const Dataset& ds, const std::vector<std::size_t>& idx, Space space);

/// One partition per effect cluster of `option`, canonically ordered by centroid.
std::vector<Partition> cluster_effects(const Dataset& ds, OptionId option, Space space, const PartitionParams& params,
                                       const RangeScaling& scaling);
std::vector<Partition> cluster_effects(const Dataset& ds, OptionId option, Space space,
                                       const PartitionParams& params = {});

/// Symmetrised fraction of each side's start vectors within eps of the other's.
double overlap_score(const Partition& a, const Partition& b, const Dataset& ds, const PartitionParams& params,
                     const RangeScaling& scaling);

/// Unions partitions whose overlap exceeds the threshold, transitively, until
/// no pair qualifies. Outcomes of merged partitions are kept apart.
std::vector<Partition> merge_overlapping(std::vector<Partition> parts, const Dataset& ds, const PartitionParams& params,
                                         const RangeScaling& scaling);
std::vector<Partition> merge_overlapping(std::vector<Partition> parts, const Dataset& ds,
                                         const PartitionParams& params = {});

/// Permutation p-value for dependence of effects on starts: members are split
/// at the median of the first principal start direction and the halves'
/// effects compared by energy distance.
double check_subgoal(const Partition& part, const Dataset& ds, const RangeScaling& scaling,
                     std::size_t min_samples = 5, std::size_t permutations = 200, std::uint64_t seed = 0);

/// cluster_effects followed by merge_overlapping for every option with successes.
std::vector<Partition> partition_options(const Dataset& ds, Space space, const PartitionParams& params,
                                         const RangeScaling& scaling);

/// Renumbers partitions of each option by lexicographic centroid of their first outcome.
void canonicalize(std::vector<Partition>& parts, const Dataset& ds, const RangeScaling& scaling);

}  // namespace portsym
