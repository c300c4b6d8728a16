#include <doctest.h>

#include "portsym/classifier.hpp"
#include "portsym/dbscan.hpp"
#include "portsym/kde.hpp"
#include "portsym/stats.hpp"

#include <cmath>

using namespace portsym;

namespace {

Matrix blob(const Eigen::Vector2d& center, double sd, std::size_t n, Rng& rng) {
  std::normal_distribution<double> g(0.0, sd);
  Matrix X(Index(n), 2);
  for (Index i = 0; i < X.rows(); ++i) X.row(i) << center.x() + g(rng), center.y() + g(rng);
  return X;
}

Matrix stack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("dbscan separates blobs and marks isolated points as noise") {
    Rng rng(1);
    Matrix X = stack(blob({0, 0}, 0.05, 40, rng), blob({5, 5}, 0.05, 40, rng));
    X.conservativeResize(X.rows() + 1, 2);
    X.row(X.rows() - 1) << 10, -10;
    const auto r = dbscan(X, 0.5, 5);
    CHECK(r.num_clusters == 2);
    CHECK(r.labels.back() == DbscanResult::kNoise);
    for (Index i = 0; i < 40; ++i) {
      CHECK(r.labels[std::size_t(i)] == 0);
      CHECK(r.labels[std::size_t(i + 40)] == 1);
    }
  }

  TEST_CASE("dbscan links a chain through density reachability") {
    Matrix X(20, 1);
    for (Index i = 0; i < 20; ++i) X(i, 0) = 0.5 * double(i);
    CHECK(dbscan(X, 0.6, 3).num_clusters == 1);
    // Endpoints have one neighbour: border points, still in the cluster.
    CHECK(dbscan(X, 0.6, 3).labels.front() == 0);
    CHECK(dbscan(X, 0.4, 2).num_clusters == 0);
  }

  TEST_CASE("dbscan with min_samples 1 makes every point core") {
    Matrix X(3, 1);
    X << 0, 10, 20;
    const auto r = dbscan(X, 1.0, 1);
    CHECK(r.num_clusters == 3);
    CHECK(r.labels == std::vector<int>{0, 1, 2});
  }

  TEST_CASE("kde integrates to one: 1-d quadrature") {
    Rng rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix X(200, 1);
    for (Index i = 0; i < X.rows(); ++i) X(i, 0) = g(rng) + (i % 2 ? 3.0 : 0.0);
    const GaussianKde kde = GaussianKde::fit(X);
    // Trapezoid rule over a range well past every centre.
    const double lo = X.minCoeff() - 8, hi = X.maxCoeff() + 8;
    const int steps = 20000;
    const double h = (hi - lo) / steps;
    double sum = 0.0;
    for (int k = 0; k <= steps; ++k) {
      const double w = (k == 0 || k == steps) ? 0.5 : 1.0;
      sum += w * kde.density(Vector::Constant(1, lo + h * k));
    }
    CHECK(sum * h == doctest::Approx(1.0).epsilon(1e-3));
  }

  TEST_CASE("kde integrates to one: 2-d Monte Carlo over a bounding box") {
    Rng rng(3);
    const Matrix X = stack(blob({0, 0}, 0.3, 100, rng), blob({2, 1}, 0.2, 100, rng));
    const GaussianKde kde = GaussianKde::fit(X);
    const Eigen::Vector2d lo = X.colwise().minCoeff().transpose().array() - 2.0;
    const Eigen::Vector2d hi = X.colwise().maxCoeff().transpose().array() + 2.0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = 200000;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      Vector x(2);
      x << lo.x() + u(rng) * (hi.x() - lo.x()), lo.y() + u(rng) * (hi.y() - lo.y());
      sum += kde.density(x);
    }
    const double volume = (hi - lo).prod();
    CHECK(std::abs(volume * sum / n - 1.0) <= 0.05);
  }

  TEST_CASE("silverman bandwidth in one dimension is 1.06 sigma n^-1/5") {
    Rng rng(4);
    std::normal_distribution<double> g(0.0, 2.0);
    Matrix X(500, 1);
    for (Index i = 0; i < X.rows(); ++i) X(i, 0) = g(rng);
    const double mean = X.mean();
    const double sd = std::sqrt((X.array() - mean).square().sum() / double(X.rows() - 1));
    const double oracle = 1.06 * sd * std::pow(500.0, -0.2);
    CHECK(silverman_bandwidth(X, 1e-9)[0] == doctest::Approx(oracle).epsilon(0.005));
    CHECK(silverman_bandwidth(Matrix::Zero(10, 1), 0.25)[0] == 0.25);
  }

  TEST_CASE("kde samples follow the density") {
    Matrix X(2, 1);
    X << -5, 5;
    const GaussianKde kde(X, Vector::Constant(1, 0.1));
    Rng rng(5);
    const Matrix S = kde.sample(4000, rng);
    const double right = (S.array() > 0).cast<double>().mean();
    CHECK(right == doctest::Approx(0.5).epsilon(0.05));
    CHECK(std::abs(S.array().abs().mean() - 5.0) < 0.02);
  }

  TEST_CASE("energy distance") {
    Matrix a(1, 1), b(1, 1);
    a << 0;
    b << 1;
    CHECK(energy_distance(a, b) == doctest::Approx(2.0));
    Rng rng(6);
    const Matrix X = blob({0, 0}, 1.0, 100, rng);
    CHECK(energy_distance(X, X) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(energy_distance(X, blob({3, 0}, 1.0, 100, rng)) > 1.0);
  }

  TEST_CASE("range scaling maps the data range onto the unit box") {
    Matrix X(3, 2);
    X << 1, 5, 3, 5, 2, 5;
    const RangeScaling s = fit_range_scaling(X);
    const Matrix Y = s.apply_rows(X);
    CHECK(Y.col(0).minCoeff() == 0.0);
    CHECK(Y.col(0).maxCoeff() == 1.0);
    CHECK(s.scale[1] == 1.0);
    const RangeScaling iso = fit_isotropic_scaling(X);
    CHECK(iso.scale[0] == 2.0);
    CHECK(iso.scale[1] == 2.0);
  }
}

TEST_SUITE("classifier") {
  TEST_CASE("identical class samples give probabilities near one half") {
    Rng rng(7);
    const Matrix X = blob({0, 0}, 1.0, 100, rng);
    const auto c = ProbabilisticClassifier::fit(X, X);
    for (Index i = 0; i < 20; ++i) CHECK(std::abs(c.probability(X.row(i).transpose()) - 0.5) < 0.1);
  }

  TEST_CASE("separable blobs are classified on held-out points") {
    Rng rng(8);
    const auto c = ProbabilisticClassifier::fit(blob({0, 0}, 0.5, 150, rng), blob({3, 3}, 0.5, 150, rng));
    const Matrix P = blob({0, 0}, 0.5, 200, rng), N = blob({3, 3}, 0.5, 200, rng);
    int correct = 0;
    for (Index i = 0; i < 200; ++i) {
      correct += c.probability(P.row(i).transpose()) > 0.5;
      correct += c.probability(N.row(i).transpose()) < 0.5;
    }
    CHECK(correct / 400.0 >= 0.95);
    const Vector p = c.probabilities(P);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.maxCoeff() <= 1.0);
  }

  TEST_CASE("swapping the classes complements the probability") {
    Rng rng(9);
    const Matrix A = blob({0, 0}, 0.7, 120, rng), B = blob({1.5, 0}, 0.7, 120, rng);
    const auto ab = ProbabilisticClassifier::fit(A, B), ba = ProbabilisticClassifier::fit(B, A);
    for (double x = -1.0; x <= 2.5; x += 0.25) {
      const Vector q = (Vector(2) << x, 0.0).finished();
      CHECK(std::abs(ab.probability(q) + ba.probability(q) - 1.0) < 0.1);
    }
  }

  TEST_CASE("probability rises across a one-dimensional boundary") {
    Rng rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix P(150, 1), N(150, 1);
    for (Index i = 0; i < 150; ++i) P(i, 0) = u(rng), N(i, 0) = -u(rng);
    const auto c = ProbabilisticClassifier::fit(P, N);
    double prev = 0.0;
    for (double x = -0.9; x <= 0.9; x += 0.05) {
      const double p = c.probability(Vector::Constant(1, x));
      CHECK(p >= prev - 0.02);
      prev = p;
    }
    CHECK(c.probability(Vector::Constant(1, -0.8)) < 0.1);
    CHECK(c.probability(Vector::Constant(1, 0.8)) > 0.9);
  }

  TEST_CASE("constant classifier and parameter round trip") {
    const auto k = ProbabilisticClassifier::constant(0.25, 3);
    CHECK(k.is_constant());
    CHECK(k.probability(Vector::Zero(3)) == doctest::Approx(0.25));
    Rng rng(11);
    const auto c = ProbabilisticClassifier::fit(blob({0, 0}, 0.5, 60, rng), blob({2, 0}, 0.5, 60, rng));
    const auto d = ProbabilisticClassifier::from_parameters(c.parameters());
    const Vector q = (Vector(2) << 0.9, 0.1).finished();
    CHECK(d.probability(q) == c.probability(q));
  }

  TEST_CASE("empty classes are rejected") {
    CHECK_THROWS_AS(ProbabilisticClassifier::fit(Matrix(0, 2), Matrix::Ones(5, 2)), InsufficientDataError);
  }
}
