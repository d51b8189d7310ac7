#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pjb/model.hpp"
#include "pjb/spectral.hpp"

namespace pjb {

/// Hermitian metric Theta = sum_n kappa_n psi_n psi_n^H solving
/// Q^H Theta = Theta Q.
struct MetricSolution {
  Eigen::MatrixXcd theta;
  std::vector<double> kappa;
  /// ||Q^H Theta - Theta Q||_F
  double residual = 0.0;
  bool positive_definite = false;
  double min_eigenvalue = 0.0;
  double condition_number = 0.0;
};

struct HermitizationResult {
  Eigen::MatrixXcd omega;
  /// Omega Q Omega^{-1}
  Eigen::MatrixXcd q_image;
  /// ||q_image - q_image^H||_F
  double hermiticity_residual = 0.0;
  /// Largest distance between matched eigenvalues of q_image and Q.
  double isospectral_residual = 0.0;
  double omega_condition = 0.0;
};

enum class Factorization { principal_sqrt, cholesky };

/// Unit-norm left eigenvectors as columns, ordered like eigenvalues(q).
Eigen::MatrixXcd left_eigenvectors(const LatticeOperator& q);

/// Requires a real simple spectrum: a spectrum with ghosts is refused with
/// DomainError (use the reduced model from phase.hpp instead).
MetricSolution metric_from_weights(const LatticeOperator& q, std::span<const double> kappa);
MetricSolution metric_from_weights(const Eigen::MatrixXcd& q, std::span<const double> kappa);

/// Basis (Frobenius-normalized) of the Hermitian solutions of
/// Q^H Theta = Theta Q, from the null space of the real-linear map on
/// Hermitian matrices. Singular values below tol * max(1, sigma_max) count
/// as null directions.
std::vector<Eigen::MatrixXcd> intertwiner_basis(const Eigen::MatrixXcd& q, double tol = 1e-10);
std::vector<Eigen::MatrixXcd> intertwiner_basis(const LatticeOperator& q, double tol = 1e-10);

/// ||Theta - P Theta||_F / ||Theta||_F where P projects onto the real span of
/// `basis`.
double span_residual(std::span<const Eigen::MatrixXcd> basis, const Eigen::MatrixXcd& theta);

/// Omega with Omega^H Omega = Theta. Throws NumericalError with the smallest
/// eigenvalue when Theta is not positive definite.
Eigen::MatrixXcd factor_metric(const Eigen::MatrixXcd& theta, Factorization kind = Factorization::principal_sqrt);

HermitizationResult hermitize(const Eigen::MatrixXcd& q, const Eigen::MatrixXcd& omega);
HermitizationResult hermitize(const LatticeOperator& q, const Eigen::MatrixXcd& omega);

}  // namespace pjb
