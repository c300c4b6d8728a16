#pragma once

#include "portsym/common.hpp"
#include "portsym/stats.hpp"

#include <vector>

namespace portsym {

struct SvmParams {
  double C = 10.0;
  /// RBF width on range-scaled inputs; <= 0 picks 1 / (dim * variance).
  double gamma = 0.0;
  /// With automatic gamma, multipliers of the base width tried by cross-validation.
  std::vector<double> gamma_grid = {1.0, 10.0, 100.0};
  std::size_t cv_folds = 3;
  double tolerance = 1e-3;
  std::size_t max_iterations = 200000;
  /// Training points kept per class (deterministic subsample above this).
  std::size_t max_per_class = 300;
  std::uint64_t seed = 0;
};

/// Binary classifier returning calibrated probabilities: an RBF-kernel support
/// vector machine whose decision value is mapped through a fitted sigmoid
/// (Platt scaling).
class ProbabilisticClassifier {
 public:
  ProbabilisticClassifier() = default;

  static ProbabilisticClassifier fit(const Matrix& positives, const Matrix& negatives,
                                     const SvmParams& params = {});
  static ProbabilisticClassifier constant(double probability, Index dim);

  double decision_value(const Eigen::Ref<const Vector>& x) const;
  double probability(const Eigen::Ref<const Vector>& x) const;
  Vector probabilities(const Matrix& X) const;

  Index dim() const { return scaling_.dim(); }
  bool is_constant() const { return support_.rows() == 0; }

  // Raw parameters, for serialization.
  struct Parameters {
    RangeScaling scaling;
    Matrix support;  // scaled support vectors, one per row
    Vector coef;     // alpha_i * y_i
    double rho = 0.0;
    double gamma = 1.0;
    double platt_a = 0.0;
    double platt_b = 0.0;
  };
  Parameters parameters() const;
  static ProbabilisticClassifier from_parameters(Parameters p);

 private:
  RangeScaling scaling_;
  Matrix support_;
  Vector coef_;
  double rho_ = 0.0;
  double gamma_ = 1.0;
  double platt_a_ = 0.0;
  double platt_b_ = 0.0;
};

}  // namespace portsym
