#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pjb/metric.hpp"
#include "pjb/model.hpp"
#include "pjb/spectral.hpp"

namespace pjb {

struct PhaseTableRow {
  Word word;
  std::uint64_t index = 0;
  int n_real_before = 0;  ///< at t = -t0
  int n_real_after = 0;   ///< at t = +t0
  double t0 = 0.0;
};

/// One row per word index 0 .. 2^J - 1, ordered by index.
std::vector<PhaseTableRow> classify_all_words(int n, double t0, int threads = 1,
                                              const ClassifyOptions& opts = {});

struct DefectivenessCertificate {
  double t = 0.0;
  Complex z;
  int algebraic_multiplicity = 0;
  int geometric_multiplicity = 0;
  int rank = 0;
};

/// Rank of Q - zI from singular values above 1e-10 ||Q||_2; algebraic
/// multiplicity counts eigenvalues within `cluster_tol` of z.
DefectivenessCertificate defectiveness(const LatticeOperator& q, Complex z = {0.0, 0.0}, double cluster_tol = 1e-6);

/// Ghost elimination: projector onto the span of real-eigenvalue
/// eigenvectors and the operator restricted to it.
struct ReducedModel {
  /// P = sum over real q_n of x_n psi_n^H / (psi_n^H x_n), then refined by
  /// Newton steps P <- 3P^2 - 2P^3 while the idempotency residual drops.
  Eigen::MatrixXcd projector;
  int reduced_dim = 0;
  std::vector<double> real_eigenvalues;
  /// Orthonormal basis of range(P), N x N'.
  Eigen::MatrixXcd basis;
  /// basis^H Q basis
  Eigen::MatrixXcd q_reduced;
  /// kappa = 1 metric of q_reduced
  Eigen::MatrixXcd theta_reduced;

  double idempotency_residual = 0.0;  ///< ||P^2 - P||_F
  double commutation_residual = 0.0;  ///< ||QP - PQ||_F
  double metric_residual = 0.0;       ///< ||Q_R^H Theta_R - Theta_R Q_R||_F
  double theta_min_eigenvalue = 0.0;
};

ReducedModel real_subspace_projector(const LatticeOperator& q, const SpectrumClassification& cls);

/// Hermitian image of the reduced operator via Omega_R = sqrt(Theta_R).
HermitizationResult reduced_hermitize(const ReducedModel& rm);

}  // namespace pjb
