#pragma once

#include "portsym/common.hpp"

namespace portsym {

/// Product-Gaussian kernel density estimate with a diagonal bandwidth shared by
/// all kernels.
class GaussianKde {
 public:
  GaussianKde() = default;
  GaussianKde(Matrix centers, Vector bandwidth);

  /// Bandwidth by Silverman's rule, floored at `bandwidth_floor`. At most
  /// `max_centers` samples are kept as kernel centres (deterministic subset).
  static GaussianKde fit(const Matrix& samples, double bandwidth_floor = 1e-3,
                         std::size_t max_centers = 400, std::uint64_t seed = 0);

  double log_density(const Eigen::Ref<const Vector>& x) const;
  double density(const Eigen::Ref<const Vector>& x) const;
  Vector log_density_rows(const Matrix& X) const;

  Vector sample(Rng& rng) const;
  Matrix sample(std::size_t n, Rng& rng) const;

  /// Same centres, bandwidth widened to at least `min_bandwidth` per dimension.
  GaussianKde widened(const Vector& min_bandwidth) const;

  Vector mean() const;
  const Matrix& centers() const { return centers_; }
  const Vector& bandwidth() const { return bandwidth_; }
  Index dim() const { return centers_.cols(); }
  Index size() const { return centers_.rows(); }
  bool empty() const { return centers_.rows() == 0; }

 private:
  Matrix centers_;
  Vector bandwidth_;
  double log_norm_ = 0.0;
};

}  // namespace portsym
