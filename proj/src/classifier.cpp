#include "portsym/classifier.hpp"

#include <cmath>
#include <limits>

namespace portsym {
namespace {

constexpr double kTau = 1e-12;

struct SmoSolution {
  Vector alpha;
  double rho = 0.0;
};

// Dual C-SVC solved by sequential minimal optimisation with second-order
// working-set selection. K is the full kernel matrix, y in {-1, +1}.
SmoSolution solve_smo(const Matrix& K, const Vector& y, double C, double tol, std::size_t max_iter) {
  const Index n = y.size();
  Vector alpha = Vector::Zero(n);
  Vector G = -Vector::Ones(n);
  const Vector QD = K.diagonal();
  auto upper = [&](Index t) { return alpha[t] >= C; };
  auto lower = [&](Index t) { return alpha[t] <= 0.0; };
  auto Q = [&](Index i, Index j) { return y[i] * y[j] * K(i, j); };

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    Index i = -1;
    for (Index t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!upper(t) && -G[t] >= gmax) gmax = -G[t], i = t;
      } else {
        if (!lower(t) && G[t] >= gmax) gmax = G[t], i = t;
      }
    }
    if (i < 0) break;
    double gmax2 = -std::numeric_limits<double>::infinity();
    double obj_min = std::numeric_limits<double>::infinity();
    Index j = -1;
    for (Index t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (lower(t)) continue;
        const double grad_diff = gmax + G[t];
        gmax2 = std::max(gmax2, G[t]);
        if (grad_diff > 0) {
          double quad = QD[i] + QD[t] - 2.0 * y[i] * Q(i, t);
          const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
          if (obj <= obj_min) obj_min = obj, j = t;
        }
      } else {
        if (upper(t)) continue;
        const double grad_diff = gmax - G[t];
        gmax2 = std::max(gmax2, -G[t]);
        if (grad_diff > 0) {
          double quad = QD[i] + QD[t] + 2.0 * y[i] * Q(i, t);
          const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
          if (obj <= obj_min) obj_min = obj, j = t;
        }
      }
    }
    if (gmax + gmax2 < tol || j < 0) break;

    const double old_ai = alpha[i], old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = QD[i] + QD[j] + 2.0 * Q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) alpha[j] = 0, alpha[i] = diff;
      } else {
        if (alpha[i] < 0) alpha[i] = 0, alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) alpha[i] = C, alpha[j] = C - diff;
      } else {
        if (alpha[j] > C) alpha[j] = C, alpha[i] = C + diff;
      }
    } else {
      double quad = QD[i] + QD[j] - 2.0 * Q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) alpha[i] = C, alpha[j] = sum - C;
      } else {
        if (alpha[j] < 0) alpha[j] = 0, alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) alpha[j] = C, alpha[i] = sum - C;
      } else {
        if (alpha[i] < 0) alpha[i] = 0, alpha[j] = sum;
      }
    }
    const double dai = alpha[i] - old_ai, daj = alpha[j] - old_aj;
    for (Index t = 0; t < n; ++t) G[t] += Q(i, t) * dai + Q(j, t) * daj;
  }

  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0;
  int free = 0;
  for (Index t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free;
      sum_free += yg;
    }
  }
  SmoSolution sol;
  sol.alpha = alpha;
  if (free > 0) sol.rho = sum_free / free;
  else if (std::isfinite(ub) && std::isfinite(lb)) sol.rho = 0.5 * (ub + lb);
  else sol.rho = 0.0;
  return sol;
}

// Sigmoid fit P(y=1|f) = 1 / (1 + exp(A f + B)) with Newton steps and
// backtracking, on prior-smoothed targets.
std::pair<double, double> fit_platt(const Vector& dec, const Vector& y) {
  const double prior1 = double((y.array() > 0).count());
  const double prior0 = double(y.size()) - prior1;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  const Index n = dec.size();
  Vector t(n);
  for (Index i = 0; i < n; ++i) t[i] = y[i] > 0 ? hi : lo;

  auto objective = [&](double A, double B) {
    double f = 0;
    for (Index i = 0; i < n; ++i) {
      const double z = dec[i] * A + B;
      f += z >= 0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };
  double A = 0.0, B = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(A, B);
  constexpr double kSigma = 1e-12;
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0, g1 = 0, g2 = 0;
    for (Index i = 0; i < n; ++i) {
      const double z = dec[i] * A + B;
      double p, q;
      if (z >= 0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += dec[i] * dec[i] * d2;
      h22 += d2;
      h21 += dec[i] * d2;
      const double d1 = t[i] - p;
      g1 += dec[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
    const double det = h11 * h22 - h21 * h21;
    const double dA = -(h22 * g1 - h21 * g2) / det;
    const double dB = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * dA + g2 * dB;
    double step = 1.0;
    while (step >= 1e-10) {
      const double nA = A + step * dA, nB = B + step * dB;
      const double nf = objective(nA, nB);
      if (nf < fval + 1e-4 * step * gd) {
        A = nA, B = nB, fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < 1e-10) break;
  }
  return {A, B};
}

// Width multiplier with the fewest cross-validation errors; ties keep the smoother kernel.
double select_gamma(const Matrix& D, const Vector& y, double base, const SvmParams& params) {
  if (params.gamma_grid.size() <= 1 || params.cv_folds < 2 || y.size() < Index(2 * params.cv_folds))
    return base * (params.gamma_grid.empty() ? 1.0 : params.gamma_grid.front());
  const Index n = y.size();
  double best_gamma = base * params.gamma_grid.front();
  std::size_t best_errors = std::numeric_limits<std::size_t>::max();
  for (double m : params.gamma_grid) {
    const double g = base * m;
    std::size_t errors = 0;
    for (std::size_t f = 0; f < params.cv_folds; ++f) {
      std::vector<Index> train, test;
      for (Index i = 0; i < n; ++i) (std::size_t(i) % params.cv_folds == f ? test : train).push_back(i);
      const Vector yt = y(train);
      if (yt.maxCoeff() == yt.minCoeff()) continue;
      const Matrix Kt = (-g * D(train, train)).array().exp().matrix();
      const SmoSolution sol = solve_smo(Kt, yt, params.C, params.tolerance, params.max_iterations);
      for (Index t : test) {
        double f_val = -sol.rho;
        for (Index k = 0; k < Index(train.size()); ++k)
          if (sol.alpha[k] > 0) f_val += sol.alpha[k] * yt[k] * std::exp(-g * D(t, train[std::size_t(k)]));
        errors += (f_val >= 0 ? 1.0 : -1.0) != y[t];
      }
    }
    if (errors < best_errors) best_errors = errors, best_gamma = g;
  }
  return best_gamma;
}

}  // namespace

ProbabilisticClassifier ProbabilisticClassifier::fit(const Matrix& positives, const Matrix& negatives,
                                                     const SvmParams& params) {
  if (positives.rows() == 0 || negatives.rows() == 0)
    throw InsufficientDataError("classifier needs samples of both classes");
  if (positives.cols() != negatives.cols()) throw std::invalid_argument("classifier: dimension mismatch");

  const auto pos_idx = subsample_indices(std::size_t(positives.rows()), params.max_per_class, derive_seed(params.seed, 1));
  const auto neg_idx = subsample_indices(std::size_t(negatives.rows()), params.max_per_class, derive_seed(params.seed, 2));
  const Index np = Index(pos_idx.size()), nn = Index(neg_idx.size());
  Matrix X(np + nn, positives.cols());
  X.topRows(np) = select_rows(positives, pos_idx);
  X.bottomRows(nn) = select_rows(negatives, neg_idx);
  Vector y(np + nn);
  y.head(np).setOnes();
  y.tail(nn).setConstant(-1.0);

  ProbabilisticClassifier c;
  c.scaling_ = fit_range_scaling(X);
  const Matrix Z = c.scaling_.apply_rows(X);
  const Matrix D = pairwise_sq_distances(Z, Z);
  if (params.gamma > 0) {
    c.gamma_ = params.gamma;
  } else {
    const double var = (Z.array() - Z.mean()).square().mean();
    const double base = 1.0 / (double(Z.cols()) * (var > 1e-12 ? var : 1.0));
    c.gamma_ = select_gamma(D, y, base, params);
  }
  const Matrix K = (-c.gamma_ * D).array().exp().matrix();
  const SmoSolution sol = solve_smo(K, y, params.C, params.tolerance, params.max_iterations);

  std::vector<std::size_t> sv;
  for (Index i = 0; i < y.size(); ++i)
    if (sol.alpha[i] > 0) sv.push_back(std::size_t(i));
  c.support_ = select_rows(Z, sv);
  c.coef_.resize(Index(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) c.coef_[Index(k)] = sol.alpha[Index(sv[k])] * y[Index(sv[k])];
  c.rho_ = sol.rho;

  Vector dec(y.size());
  for (Index i = 0; i < y.size(); ++i) {
    double f = -c.rho_;
    for (std::size_t k = 0; k < sv.size(); ++k) f += c.coef_[Index(k)] * K(i, Index(sv[k]));
    dec[i] = f;
  }
  std::tie(c.platt_a_, c.platt_b_) = fit_platt(dec, y);
  return c;
}

ProbabilisticClassifier ProbabilisticClassifier::constant(double probability, Index dim) {
  ProbabilisticClassifier c;
  c.scaling_.offset = Vector::Zero(dim);
  c.scaling_.scale = Vector::Ones(dim);
  c.support_.resize(0, dim);
  const double p = std::clamp(probability, 1e-12, 1.0 - 1e-12);
  c.platt_a_ = 0.0;
  c.platt_b_ = std::log((1.0 - p) / p);
  return c;
}

double ProbabilisticClassifier::decision_value(const Eigen::Ref<const Vector>& x) const {
  if (support_.rows() == 0) return 0.0;
  const Vector z = scaling_.apply(x);
  const Eigen::ArrayXd d2 = (support_.rowwise() - z.transpose()).rowwise().squaredNorm().array();
  return ((-gamma_ * d2).exp().matrix().dot(coef_)) - rho_;
}

double ProbabilisticClassifier::probability(const Eigen::Ref<const Vector>& x) const {
  const double z = decision_value(x) * platt_a_ + platt_b_;
  return z >= 0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

Vector ProbabilisticClassifier::probabilities(const Matrix& X) const {
  Vector out(X.rows());
  for (Index i = 0; i < X.rows(); ++i) out[i] = probability(X.row(i).transpose());
  return out;
}

ProbabilisticClassifier::Parameters ProbabilisticClassifier::parameters() const {
  return {scaling_, support_, coef_, rho_, gamma_, platt_a_, platt_b_};
}

ProbabilisticClassifier ProbabilisticClassifier::from_parameters(Parameters p) {
  ProbabilisticClassifier c;
  c.scaling_ = std::move(p.scaling);
  c.support_ = std::move(p.support);
  c.coef_ = std::move(p.coef);
  c.rho_ = p.rho;
  c.gamma_ = p.gamma;
  c.platt_a_ = p.platt_a;
  c.platt_b_ = p.platt_b;
  if (c.coef_.size() != c.support_.rows()) throw ValidationError("classifier: coefficient count mismatch");
  return c;
}

}  // namespace portsym
