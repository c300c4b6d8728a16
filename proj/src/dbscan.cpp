#include "portsym/dbscan.hpp"

#include "portsym/stats.hpp"

#include <cstring>
#include <deque>
#include <limits>
#include <string>
#include <unordered_map>

namespace portsym {
namespace {

// Distinct rows in order of first occurrence; `of` maps each row to its distinct row.
struct DistinctRows {
  Matrix points;
  std::vector<std::size_t> weight;
  std::vector<std::size_t> of;
};

DistinctRows distinct_rows(const Matrix& X) {
  DistinctRows d;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<Index> first;
  d.of.resize(std::size_t(X.rows()));
  std::string key(std::size_t(X.cols()) * sizeof(double), '\0');
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index k = 0; k < X.cols(); ++k) {
      const double v = X(i, k);
      std::memcpy(key.data() + std::size_t(k) * sizeof(double), &v, sizeof(double));
    }
    const auto [it, fresh] = index.emplace(key, first.size());
    if (fresh) {
      first.push_back(i);
      d.weight.push_back(0);
    }
    ++d.weight[it->second];
    d.of[std::size_t(i)] = it->second;
  }
  d.points.resize(Index(first.size()), X.cols());
  for (std::size_t u = 0; u < first.size(); ++u) d.points.row(Index(u)) = X.row(first[u]);
  return d;
}

// Weighted neighbour counts in row blocks so the full distance matrix is never held.
std::vector<std::size_t> neighbour_counts(const Matrix& X, const std::vector<std::size_t>& weight, double eps2) {
  const Index n = X.rows();
  constexpr Index kBlock = 256;
  std::vector<std::size_t> counts(std::size_t(n), 0);
  for (Index start = 0; start < n; start += kBlock) {
    const Index rows = std::min(kBlock, n - start);
    const Matrix D = pairwise_sq_distances(X.middleRows(start, rows), X);
    for (Index r = 0; r < rows; ++r)
      for (Index q = 0; q < n; ++q)
        if (D(r, q) <= eps2) counts[std::size_t(start + r)] += weight[std::size_t(q)];
  }
  return counts;
}

}  // namespace

DbscanResult dbscan(const Matrix& points, double eps, std::size_t min_samples) {
  if (!(eps > 0)) throw std::invalid_argument("dbscan: eps must be positive");
  if (min_samples < 1) throw std::invalid_argument("dbscan: min_samples must be at least 1");
  DbscanResult result;
  result.labels.assign(std::size_t(points.rows()), DbscanResult::kNoise);
  if (points.rows() == 0) return result;

  // Copies of a row share its neighbourhood and therefore its label, so
  // clustering the distinct rows with multiplicities is exact.
  const DistinctRows d = distinct_rows(points);
  const Matrix& X = d.points;
  const Index n = X.rows();
  const double eps2 = eps * eps;
  const auto counts = neighbour_counts(X, d.weight, eps2);
  const Vector norms = X.rowwise().squaredNorm();
  std::vector<bool> visited(std::size_t(n), false);
  std::vector<int> label(std::size_t(n), DbscanResult::kNoise);

  auto neighbours = [&](Index p, std::vector<Index>& out) {
    out.clear();
    const Vector d2 = (norms.array() + norms[p] - 2.0 * (X * X.row(p).transpose()).array()).matrix();
    for (Index q = 0; q < n; ++q)
      if (d2[q] <= eps2) out.push_back(q);
  };

  std::vector<Index> nb;
  std::deque<Index> frontier;
  for (Index p = 0; p < n; ++p) {
    if (visited[std::size_t(p)] || counts[std::size_t(p)] < min_samples) continue;
    const int cluster = result.num_clusters++;
    visited[std::size_t(p)] = true;
    label[std::size_t(p)] = cluster;
    frontier.assign(1, p);
    while (!frontier.empty()) {
      const Index c = frontier.front();
      frontier.pop_front();
      neighbours(c, nb);
      for (Index q : nb) {
        if (label[std::size_t(q)] == DbscanResult::kNoise) label[std::size_t(q)] = cluster;
        if (!visited[std::size_t(q)] && counts[std::size_t(q)] >= min_samples) {
          visited[std::size_t(q)] = true;
          frontier.push_back(q);
        }
      }
    }
  }
  for (std::size_t i = 0; i < d.of.size(); ++i) result.labels[i] = label[d.of[i]];
  return result;
}

std::size_t nearest_row(const Matrix& points, const std::vector<std::size_t>& candidates,
                        const Eigen::Ref<const Eigen::RowVectorXd>& query) {
  std::size_t best = candidates.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c : candidates) {
    const double d = (points.row(Index(c)) - query).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace portsym
