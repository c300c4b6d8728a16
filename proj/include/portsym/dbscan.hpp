#pragma once

#include "portsym/common.hpp"

#include <vector>

namespace portsym {

struct DbscanResult {
  /// Cluster id per point, or kNoise.
  std::vector<int> labels;
  int num_clusters = 0;

  static constexpr int kNoise = -1;
};

/// Density-based clustering: a point is core when at least `min_samples`
/// points (itself included) lie within `eps`; clusters are the
/// density-reachable closures of core points. Cluster ids follow the index of
/// each cluster's first core point.
DbscanResult dbscan(const Matrix& points, double eps, std::size_t min_samples);

/// Index of the nearest row of `points` among `candidates` (squared Euclidean).
std::size_t nearest_row(const Matrix& points, const std::vector<std::size_t>& candidates,
                        const Eigen::Ref<const Eigen::RowVectorXd>& query);

}  // namespace portsym
