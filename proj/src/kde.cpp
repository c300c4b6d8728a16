#include "portsym/kde.hpp"

#include "portsym/stats.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace portsym {

GaussianKde::GaussianKde(Matrix centers, Vector bandwidth)
    : centers_(std::move(centers)), bandwidth_(std::move(bandwidth)) {
  if (centers_.cols() != bandwidth_.size())
    throw std::invalid_argument("GaussianKde: bandwidth dimension mismatch");
  if ((bandwidth_.array() <= 0).any()) throw std::invalid_argument("GaussianKde: bandwidth must be positive");
  // log of (1/n) * prod_d 1/(sqrt(2 pi) h_d)
  log_norm_ = -std::log(double(std::max<Index>(1, centers_.rows()))) -
              bandwidth_.array().log().sum() -
              0.5 * double(centers_.cols()) * std::log(2.0 * std::numbers::pi);
}

GaussianKde GaussianKde::fit(const Matrix& samples, double bandwidth_floor, std::size_t max_centers,
                             std::uint64_t seed) {
  if (samples.rows() == 0) throw InsufficientDataError("GaussianKde: no samples");
  const auto keep = subsample_indices(std::size_t(samples.rows()), max_centers, seed);
  Matrix centers = keep.size() == std::size_t(samples.rows()) ? samples : select_rows(samples, keep);
  Vector h = silverman_bandwidth(centers, bandwidth_floor);
  return GaussianKde(std::move(centers), std::move(h));
}

double GaussianKde::log_density(const Eigen::Ref<const Vector>& x) const {
  if (centers_.rows() == 0) return -std::numeric_limits<double>::infinity();
  const Vector inv_h = bandwidth_.cwiseInverse();
  const Eigen::ArrayXd z2 =
      ((centers_.rowwise() - x.transpose()).array().rowwise() * inv_h.transpose().array()).square().rowwise().sum();
  const double m = (-0.5 * z2).maxCoeff();
  return log_norm_ + m + std::log((-0.5 * z2 - m).exp().sum());
}

double GaussianKde::density(const Eigen::Ref<const Vector>& x) const { return std::exp(log_density(x)); }

Vector GaussianKde::log_density_rows(const Matrix& X) const {
  Vector out(X.rows());
  for (Index i = 0; i < X.rows(); ++i) out[i] = log_density(X.row(i).transpose());
  return out;
}

Vector GaussianKde::sample(Rng& rng) const {
  std::uniform_int_distribution<Index> pick(0, centers_.rows() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x = centers_.row(pick(rng)).transpose();
  for (Index d = 0; d < x.size(); ++d) x[d] += bandwidth_[d] * normal(rng);
  return x;
}

Matrix GaussianKde::sample(std::size_t n, Rng& rng) const {
  Matrix out(Index(n), dim());
  for (Index i = 0; i < Index(n); ++i) out.row(i) = sample(rng).transpose();
  return out;
}

GaussianKde GaussianKde::widened(const Vector& min_bandwidth) const {
  return GaussianKde(centers_, bandwidth_.cwiseMax(min_bandwidth));
}

Vector GaussianKde::mean() const { return centers_.colwise().mean().transpose(); }

}  // namespace portsym
