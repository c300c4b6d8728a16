#pragma once

// Small dense-statistics helpers. Sample matrices hold one sample per row.

#include "portsym/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace portsym {

/// Affine map x -> (x - offset) / scale, applied per dimension.
struct RangeScaling {
  Vector offset;
  Vector scale;

  template <typename Derived>
  Vector apply(const Eigen::MatrixBase<Derived>& x) const {
    return (x - offset).cwiseQuotient(scale);
  }

  template <typename Derived>
  Matrix apply_rows(const Eigen::MatrixBase<Derived>& X) const {
    return (X.rowwise() - offset.transpose()).array().rowwise() / scale.transpose().array();
  }

  Index dim() const { return offset.size(); }
};

/// Scales each dimension by its observed range; constant dimensions keep unit scale.
template <typename Derived>
RangeScaling fit_range_scaling(const Eigen::MatrixBase<Derived>& X) {
  RangeScaling s;
  if (X.rows() == 0) {
    s.offset = Vector::Zero(X.cols());
    s.scale = Vector::Ones(X.cols());
    return s;
  }
  s.offset = X.colwise().minCoeff().transpose();
  s.scale = (X.colwise().maxCoeff() - X.colwise().minCoeff()).transpose();
  for (Index i = 0; i < s.scale.size(); ++i)
    if (!(s.scale[i] > 1e-12)) s.scale[i] = 1.0;
  return s;
}

/// Range scaling with one shared scale, the largest per-dimension range, so a
/// dimension that only carries noise is not stretched to unit width.
template <typename Derived>
RangeScaling fit_isotropic_scaling(const Eigen::MatrixBase<Derived>& X) {
  RangeScaling s = fit_range_scaling(X);
  if (X.rows() == 0) return s;
  const Vector range = (X.colwise().maxCoeff() - X.colwise().minCoeff()).transpose();
  const double widest = range.size() ? range.maxCoeff() : 0.0;
  s.scale = Vector::Constant(X.cols(), widest > 1e-12 ? widest : 1.0);
  return s;
}

/// Squared Euclidean distances between the rows of A and the rows of B.
template <typename DA, typename DB>
Matrix pairwise_sq_distances(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DB>& B) {
  const Vector a2 = A.rowwise().squaredNorm();
  const Vector b2 = B.rowwise().squaredNorm();
  Matrix D = (-2.0 * (A * B.transpose())).eval();
  D.colwise() += a2;
  D.rowwise() += b2.transpose();
  return D.cwiseMax(0.0);
}

template <typename Derived>
Vector column_std(const Eigen::MatrixBase<Derived>& X) {
  if (X.rows() < 2) return Vector::Zero(X.cols());
  const Eigen::RowVectorXd mean = X.colwise().mean();
  return ((X.rowwise() - mean).colwise().squaredNorm() / double(X.rows() - 1)).cwiseSqrt().transpose();
}

/// Silverman's rule of thumb for a diagonal Gaussian-kernel bandwidth:
/// h_d = sigma_d * (4 / ((d + 2) n))^(1 / (d + 4)), floored at `floor`.
template <typename Derived>
Vector silverman_bandwidth(const Eigen::MatrixBase<Derived>& X, double floor) {
  const double n = std::max<double>(1.0, double(X.rows()));
  const double d = double(X.cols());
  const double factor = std::pow(4.0 / ((d + 2.0) * n), 1.0 / (d + 4.0));
  return (column_std(X) * factor).cwiseMax(floor);
}

/// Two-sample energy statistic 2E|X-Y| - E|X-X'| - E|Y-Y'|.
template <typename DA, typename DB>
double energy_distance(const Eigen::MatrixBase<DA>& X, const Eigen::MatrixBase<DB>& Y) {
  if (X.rows() == 0 || Y.rows() == 0) return 0.0;
  const double xy = pairwise_sq_distances(X, Y).cwiseSqrt().mean();
  const double xx = pairwise_sq_distances(X, X).cwiseSqrt().mean();
  const double yy = pairwise_sq_distances(Y, Y).cwiseSqrt().mean();
  return 2.0 * xy - xx - yy;
}

/// Rows of X selected by `idx`.
template <typename Derived>
Matrix select_rows(const Eigen::MatrixBase<Derived>& X, const std::vector<std::size_t>& idx) {
  Matrix out(Index(idx.size()), X.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(Index(i)) = X.row(Index(idx[i]));
  return out;
}

/// Deterministic subset of at most `cap` indices out of [0, n), order preserved.
inline std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t cap, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (n <= cap) return idx;
  Rng rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace portsym
