#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "pjb/errors.hpp"
#include "pjb/metric.hpp"

using namespace pjb;
using Eigen::MatrixXcd;

namespace {

double max_abs(const MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<double> ones(int n) { return std::vector<double>(static_cast<std::size_t>(n), 1.0); }

}  // namespace

TEST_CASE("left eigenvectors of the 2x2 operator") {
  const LatticeOperator q = build_operator(2, parse_word("o"), 0.1);
  const MatrixXcd psi = left_eigenvectors(q);
  const double s = 1.0 / std::sqrt(10.0);
  // ascending eigenvalues -0.3, 0.3
  CHECK(std::abs(psi(0, 0) - Complex(s, 0)) < 1e-14);
  CHECK(std::abs(psi(1, 0) - Complex(-3 * s, 0)) < 1e-14);
  CHECK(std::abs(psi(0, 1) - Complex(s, 0)) < 1e-14);
  CHECK(std::abs(psi(1, 1) - Complex(3 * s, 0)) < 1e-14);

  const MatrixXcd qt = q.dense().transpose().cast<Complex>();
  const Spectrum sp = eigenvalues(q);
  for (int k = 0; k < 2; ++k) CHECK(max_abs(qt * psi.col(k) - std::conj(sp.values[k]) * psi.col(k)) < 1e-14);

  CHECK_THROWS_AS(left_eigenvectors(jordan_block(4)), NumericalError);
}

TEST_CASE("left eigenvectors are biorthogonal to the right ones") {
  const LatticeOperator q = build_operator(3, parse_word("o"), 0.1);
  const Eigensystem es = eigensystem(q);
  const MatrixXcd psi = left_eigenvectors(q);
  REQUIRE(psi.cols() == 3);
  const MatrixXcd g = psi.adjoint() * es.right;
  for (int m = 0; m < 3; ++m) {
    CHECK(psi.col(m).norm() == doctest::Approx(1.0));
    for (int n = 0; n < 3; ++n) {
      if (m != n) CHECK(std::abs(g(m, n)) < 1e-9);
    }
  }
}

TEST_CASE("metric from weights") {
  const LatticeOperator q = build_operator(2, parse_word("o"), 0.1);
  const MetricSolution m = metric_from_weights(q, ones(2));
  // unit-norm psi = (1, +-3)/sqrt(10): one tenth of the unnormalized [[2,0],[0,18]]
  MatrixXcd expected(2, 2);
  expected << 0.2, 0.0, 0.0, 1.8;
  CHECK(max_abs(m.theta - expected) < 1e-14);
  CHECK(m.residual < 1e-14);
  CHECK(m.positive_definite);
  CHECK(m.min_eigenvalue == doctest::Approx(0.2));
  CHECK(m.condition_number == doctest::Approx(9.0));

  for (double a : {0.5, 3.0, 100.0}) {
    const std::vector<double> kappa{a, a};
    const MetricSolution scaled = metric_from_weights(q, kappa);
    CHECK(max_abs(scaled.theta - a * m.theta) < 1e-12 * a);
    CHECK(scaled.positive_definite == m.positive_definite);
  }

  const LatticeOperator q10 = build_operator(10, parse_word("ooooe"), 0.1);
  const MetricSolution m10 = metric_from_weights(q10, ones(10));
  CHECK(m10.residual <= 1e-10 * m10.theta.norm());
  CHECK(m10.positive_definite);
  CHECK(max_abs(m10.theta - m10.theta.adjoint()) == 0.0);
}

TEST_CASE("metric errors") {
  const LatticeOperator q = build_operator(2, parse_word("o"), 0.1);
  CHECK_THROWS_AS(metric_from_weights(q, std::vector<double>{1.0}), DomainError);
  CHECK_THROWS_AS(metric_from_weights(q, std::vector<double>{1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(metric_from_weights(q, std::vector<double>{1.0, -1.0}), DomainError);
  CHECK_THROWS_AS(metric_from_weights(build_operator(2, parse_word("o"), -0.1), ones(2)), DomainError);
  CHECK_THROWS_AS(metric_from_weights(build_operator(10, parse_word("ooooe"), -0.1), ones(10)), DomainError);
  CHECK_THROWS(metric_from_weights(jordan_block(3), ones(3)));
}

TEST_CASE("random weights give positive intertwiners") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> weight(0.1, 10.0);
  std::uniform_real_distribution<double> time(0.05, 0.6);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 7;
    const LatticeOperator q = build_operator(n, oracle::random_word(rng, n / 2), time(rng));
    std::vector<double> kappa(static_cast<std::size_t>(n));
    for (double& k : kappa) k = weight(rng);
    const MetricSolution m = metric_from_weights(q, kappa);
    CHECK(m.residual <= 1e-10 * m.theta.norm());
    CHECK(m.positive_definite);
    CHECK(m.kappa == kappa);
  }
}

TEST_CASE("intertwiner basis") {
  SUBCASE("2x2 real pair") {
    const auto basis = intertwiner_basis(build_operator(2, parse_word("o"), 0.1));
    REQUIRE(basis.size() == 2);
    MatrixXcd a(2, 2);
    a << 1.0, 0.0, 0.0, 9.0;
    MatrixXcd b(2, 2);
    b << 0.0, 1.0, 1.0, 0.0;
    CHECK(span_residual(basis, a) < 1e-12);
    CHECK(span_residual(basis, b) < 1e-12);
    MatrixXcd off(2, 2);
    off << 1.0, 0.0, 0.0, 1.0;
    CHECK(span_residual(basis, off) > 0.1);
  }
  SUBCASE("2x2 imaginary pair") {
    const LatticeOperator q = build_operator(2, parse_word("o"), -0.1);
    const auto basis = intertwiner_basis(q);
    CHECK(basis.size() == 2);
    const MatrixXcd qh = q.dense().transpose().cast<Complex>();
    const MatrixXcd qc = q.dense().cast<Complex>();
    MatrixXcd b(2, 2);
    b << 0.0, 1.0, 1.0, 0.0;
    CHECK(span_residual(basis, b) < 1e-12);
    for (const MatrixXcd& theta : basis) {
      CHECK(max_abs(qh * theta - theta * qc) < 1e-12);
      // indefinite: conjugate-pair intertwiners cannot be positive
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(theta);
      CHECK(es.eigenvalues()(0) < 0.0);
    }
  }
  SUBCASE("dimension N and the dyadic metric in the span") {
    std::mt19937_64 rng(11);
    for (int n = 2; n <= 8; ++n) {
      for (double t : {0.05, 0.2, 0.45}) {
        const LatticeOperator q = build_operator(n, oracle::random_word(rng, n / 2), t);
        const auto basis = intertwiner_basis(q);
        CAPTURE(n);
        CAPTURE(t);
        CHECK(basis.size() == static_cast<std::size_t>(n));
        CHECK(span_residual(basis, metric_from_weights(q, ones(n)).theta) <= 1e-9);
      }
    }
  }
}

TEST_CASE("factor metric") {
  MatrixXcd theta(2, 2);
  theta << 2.0, 0.0, 0.0, 18.0;
  const MatrixXcd omega = factor_metric(theta);
  CHECK(std::abs(omega(0, 0) - std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(omega(1, 1) - std::sqrt(18.0)) < 1e-14);
  CHECK(std::abs(omega(0, 1)) < 1e-14);
  CHECK(max_abs(factor_metric(MatrixXcd::Identity(3, 3)) - MatrixXcd::Identity(3, 3)) < 1e-15);

  MatrixXcd bad(2, 2);
  bad << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(factor_metric(bad), NumericalError);
  CHECK_THROWS_AS(factor_metric(bad, Factorization::cholesky), NumericalError);
  MatrixXcd rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(factor_metric(rect), DomainError);

  const MetricSolution m = metric_from_weights(build_operator(10, parse_word("ooooe"), 0.1), ones(10));
  for (Factorization kind : {Factorization::principal_sqrt, Factorization::cholesky}) {
    const MatrixXcd w = factor_metric(m.theta, kind);
    CHECK((w.adjoint() * w - m.theta).norm() <= 1e-12 * m.theta.norm());
  }
  const MatrixXcd sq = factor_metric(m.theta);
  CHECK(max_abs(sq - sq.adjoint()) < 1e-12 * max_abs(sq));
}

TEST_CASE("hermitize") {
  const LatticeOperator q = build_operator(2, parse_word("o"), 0.1);
  MatrixXcd omega(2, 2);
  omega << std::sqrt(2.0), 0.0, 0.0, std::sqrt(18.0);
  const HermitizationResult h = hermitize(q, omega);
  MatrixXcd expected(2, 2);
  expected << 0.0, 0.3, 0.3, 0.0;
  CHECK(max_abs(h.q_image - expected) < 1e-14);
  CHECK(h.hermiticity_residual < 1e-14);
  CHECK(h.isospectral_residual < 1e-14);

  // unit-norm metric gives the same image
  const MatrixXcd omega_unit = factor_metric(metric_from_weights(q, ones(2)).theta);
  CHECK(max_abs(hermitize(q, omega_unit).q_image - expected) < 1e-14);

  const LatticeOperator sym = build_operator(4, parse_word("oo"), 0.5);
  const HermitizationResult id = hermitize(sym, MatrixXcd::Identity(4, 4));
  CHECK(max_abs(id.q_image - sym.dense().cast<Complex>()) == 0.0);

  const LatticeOperator q10 = build_operator(10, parse_word("ooooe"), 0.1);
  const MetricSolution m = metric_from_weights(q10, ones(10));
  const HermitizationResult h10 = hermitize(q10, factor_metric(m.theta));
  CHECK(h10.hermiticity_residual <= 1e-8 * h10.q_image.norm());
  CHECK(h10.isospectral_residual <= 1e-8);

  MatrixXcd singular = MatrixXcd::Identity(2, 2);
  singular(1, 1) = 0.0;
  CHECK_THROWS_AS(hermitize(q, singular), NumericalError);
  CHECK_THROWS_AS(hermitize(q, MatrixXcd::Identity(3, 3)), DomainError);
}

TEST_CASE("metric conditioning diverges towards the transition") {
  for (int n : {2, 3, 4, 6, 8, 10}) {
    CAPTURE(n);
    double previous = 0.0;
    for (double t : {1e-1, 1e-2, 1e-3}) {
      const MetricSolution m = metric_from_weights(build_operator(n, word_from_index(n / 2, 1), t), ones(n));
      CHECK(m.condition_number > previous);
      previous = m.condition_number;
    }
  }
}
