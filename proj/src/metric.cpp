#include "pjb/metric.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pjb/errors.hpp"

namespace pjb {
namespace {

void check_weights(std::span<const double> kappa, Eigen::Index n) {
  if (static_cast<Eigen::Index>(kappa.size()) != n) {
    throw DomainError("expected " + std::to_string(n) + " weights, got " + std::to_string(kappa.size()));
  }
  for (double k : kappa) {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("metric weights must be positive and finite");
  }
}

void require_real_spectrum(const Spectrum& s, double scale) {
  const ClassifyOptions defaults;
  const SpectrumClassification cls = classify(s, defaults.tol_abs, defaults.tol_rel, scale);
  if (cls.n_ghost > 0) {
    throw DomainError("spectrum has " + std::to_string(cls.n_ghost) +
                      " non-real eigenvalues; no positive-definite metric exists. Project the ghosts out first "
                      "(reduced model)");
  }
}

MetricSolution assemble_metric(const Eigen::MatrixXcd& q, const Eigensystem& es, std::span<const double> kappa) {
  const Eigen::Index n = q.rows();
  MetricSolution sol;
  sol.kappa.assign(kappa.begin(), kappa.end());
  sol.theta = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    sol.theta += kappa[static_cast<std::size_t>(c)] * es.left.col(c) * es.left.col(c).adjoint();
  }
  sol.theta = (0.5 * (sol.theta + sol.theta.adjoint())).eval();
  sol.residual = (q.adjoint() * sol.theta - sol.theta * q).norm();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sol.theta, Eigen::EigenvaluesOnly);
  sol.min_eigenvalue = eig.eigenvalues()(0);
  sol.positive_definite = sol.min_eigenvalue > 0.0;
  sol.condition_number = sol.positive_definite ? eig.eigenvalues()(n - 1) / sol.min_eigenvalue
                                               : std::numeric_limits<double>::infinity();
  return sol;
}

// Real coordinates of the Hermitian matrix space: diagonal entries, then
// (E_ij + E_ji) and i(E_ij - E_ji) for i < j.
Eigen::MatrixXcd hermitian_unit(Eigen::Index n, Eigen::Index k) {
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
  if (k < n) {
    e(k, k) = 1.0;
    return e;
  }
  Eigen::Index r = k - n;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (r == 0) {
        e(i, j) = 1.0;
        e(j, i) = 1.0;
        return e;
      }
      if (r == 1) {
        e(i, j) = Complex(0.0, 1.0);
        e(j, i) = Complex(0.0, -1.0);
        return e;
      }
      r -= 2;
    }
  }
  return e;
}

Eigen::VectorXd realify(const Eigen::MatrixXcd& m) {
  const Eigen::Index len = m.size();
  Eigen::VectorXd v(2 * len);
  for (Eigen::Index i = 0; i < len; ++i) {
    v(i) = m.data()[i].real();
    v(len + i) = m.data()[i].imag();
  }
  return v;
}

}  // namespace

Eigen::MatrixXcd left_eigenvectors(const LatticeOperator& q) { return eigensystem(q).left; }

MetricSolution metric_from_weights(const LatticeOperator& q, std::span<const double> kappa) {
  check_weights(kappa, q.n());
  require_real_spectrum(eigenvalues(q), q.frobenius_norm());
  return assemble_metric(q.dense().cast<Complex>(), eigensystem(q), kappa);
}

MetricSolution metric_from_weights(const Eigen::MatrixXcd& q, std::span<const double> kappa) {
  check_weights(kappa, q.rows());
  require_real_spectrum(eigenvalues(q), q.norm());
  return assemble_metric(q, eigensystem(q), kappa);
}

std::vector<Eigen::MatrixXcd> intertwiner_basis(const Eigen::MatrixXcd& q, double tol) {
  const Eigen::Index n = q.rows();
  const Eigen::Index dim = n * n;
  Eigen::MatrixXd map(2 * dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Eigen::MatrixXcd e = hermitian_unit(n, k);
    map.col(k) = realify(q.adjoint() * e - e * q);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(map, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = tol * std::max(1.0, sv(0));

  std::vector<Eigen::MatrixXcd> basis;
  for (Eigen::Index c = 0; c < dim; ++c) {
    if (sv(c) > cutoff) continue;
    Eigen::MatrixXcd theta = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < dim; ++k) theta += svd.matrixV()(k, c) * hermitian_unit(n, k);
    theta /= theta.norm();
    basis.push_back(std::move(theta));
  }
  return basis;
}

std::vector<Eigen::MatrixXcd> intertwiner_basis(const LatticeOperator& q, double tol) {
  return intertwiner_basis(Eigen::MatrixXcd(q.dense().cast<Complex>()), tol);
}

double span_residual(std::span<const Eigen::MatrixXcd> basis, const Eigen::MatrixXcd& theta) {
  const Eigen::VectorXd target = realify(theta);
  if (basis.empty()) return 1.0;
  Eigen::MatrixXd cols(target.size(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = realify(basis[i]);
  const Eigen::VectorXd coeff = cols.colPivHouseholderQr().solve(target);
  return (target - cols * coeff).norm() / target.norm();
}

Eigen::MatrixXcd factor_metric(const Eigen::MatrixXcd& theta, Factorization kind) {
  if (theta.rows() != theta.cols()) throw DomainError("metric must be square");
  const Eigen::MatrixXcd herm = 0.5 * (theta + theta.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm);
  const double smallest = eig.eigenvalues()(0);
  if (!(smallest > 0.0)) {
    std::ostringstream msg;
    msg << "metric is not positive definite (smallest eigenvalue " << smallest << ")";
    throw NumericalError(msg.str());
  }
  if (kind == Factorization::cholesky) {
    Eigen::LLT<Eigen::MatrixXcd> llt(herm);
    if (llt.info() != Eigen::Success) throw NumericalError("Cholesky factorization of the metric failed");
    return llt.matrixU();
  }
  const Eigen::VectorXd root = eig.eigenvalues().cwiseSqrt();
  return eig.eigenvectors() * root.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
}

namespace {

HermitizationResult hermitize_against(const Eigen::MatrixXcd& q, const Eigen::MatrixXcd& omega,
                                      const Spectrum& before) {
  if (omega.rows() != q.rows() || omega.cols() != q.cols()) throw DomainError("Omega and Q dimensions differ");
  HermitizationResult res;
  res.omega = omega;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(omega);
  const Eigen::VectorXd& sv = svd.singularValues();
  res.omega_condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (!std::isfinite(res.omega_condition) || res.omega_condition > 1e14) {
    std::ostringstream msg;
    msg << "Omega is numerically singular (condition number " << res.omega_condition << ")";
    throw NumericalError(msg.str());
  }
  res.q_image = omega * q * omega.partialPivLu().inverse();
  res.hermiticity_residual = (res.q_image - res.q_image.adjoint()).norm();

  const Spectrum after = eigenvalues(res.q_image);
  const std::vector<std::size_t> perm = match_nearest(before.values, after.values);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    res.isospectral_residual = std::max(res.isospectral_residual, std::abs(before.values[i] - after.values[perm[i]]));
  }
  return res;
}

}  // namespace

HermitizationResult hermitize(const Eigen::MatrixXcd& q, const Eigen::MatrixXcd& omega) {
  return hermitize_against(q, omega, eigenvalues(q));
}

HermitizationResult hermitize(const LatticeOperator& q, const Eigen::MatrixXcd& omega) {
  return hermitize_against(q.dense().cast<Complex>(), omega, eigenvalues(q));
}

}  // namespace pjb
