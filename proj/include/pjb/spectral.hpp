#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pjb/model.hpp"

namespace pjb {

using Complex = std::complex<double>;

/// Eigenvalues sorted by (real part, imaginary part).
struct Spectrum {
  std::vector<Complex> values;

  std::size_t size() const { return values.size(); }
};

/// Eigenvalues together with unit-norm right eigenvectors (columns of
/// `right`) and left eigenvectors (columns of `left`, Q^H psi = conj(q) psi).
/// Both are normalized so the first non-negligible component is positive
/// real. Columns follow the order of `values`.
struct Eigensystem {
  std::vector<Complex> values;
  Eigen::MatrixXcd right;
  Eigen::MatrixXcd left;
};

/// Real Schur / shifted QR on the tridiagonal operator after an exact
/// diagonal similarity that equalizes |sub_k| and |sup_k|. Throws
/// NumericalError if QR fails within 100 N sweeps.
Spectrum eigenvalues(const LatticeOperator& q);

/// General dense route (no balancing), used for reduced and Hermitized images.
Spectrum eigenvalues(const Eigen::MatrixXcd& a);

/// Throws NumericalError when the spectrum is not simple (pairwise distance
/// below `simple_tol` scaled by max(1, ||Q||_F)); t = 0 always fails.
Eigensystem eigensystem(const LatticeOperator& q, double simple_tol = 1e-6);
Eigensystem eigensystem(const Eigen::MatrixXcd& a, double simple_tol = 1e-6);

/// Diagonal of the balancing similarity D with D Q D^{-1} having
/// |sub_k| = |sup_k|. Entries of D are positive.
Eigen::VectorXd balancing_scale(const LatticeOperator& q);

struct ClassifyOptions {
  double tol_abs = 1e-9;
  double tol_rel = 1e-12;
};

struct SpectrumClassification {
  std::vector<double> real_eigenvalues;
  /// One representative per conjugate pair, imaginary part > 0.
  std::vector<Complex> ghost_pairs;
  int n_real = 0;
  int n_ghost = 0;
  double tolerance_used = 0.0;
};

/// q is real iff |Im q| <= tol_abs + tol_rel * scale. Remaining values must
/// pair up with their conjugates within 10 * tol or NumericalError is thrown.
SpectrumClassification classify(const Spectrum& s, double tol_abs, double tol_rel, double scale);

/// Convenience form with scale = ||Q||_F.
SpectrumClassification classify(const LatticeOperator& q, const ClassifyOptions& opts = {});

struct SweepOptions {
  ClassifyOptions classify;
  int threads = 1;
  /// Counts at 0 < |t| below this are flagged low confidence.
  double low_confidence_time = 1e-6;
};

struct SweepResult {
  std::vector<double> t_grid;
  /// trajectories[n][i] is trajectory n at t_grid[i].
  std::vector<std::vector<Complex>> trajectories;
  std::vector<int> real_count_per_t;
  std::vector<bool> defective;
  std::vector<bool> low_confidence;
};

SweepResult sweep(int n, const Word& w, std::span<const double> t_grid, const SweepOptions& opts = {});

/// Uniform grid of `steps` points on [t_min, t_max].
std::vector<double> linear_grid(double t_min, double t_max, int steps);

/// Greedy minimum-distance assignment: returns perm with next[perm[i]]
/// matched to prev[i]. Global greedy over sorted pairs, so always injective.
std::vector<std::size_t> match_nearest(std::span<const Complex> prev, std::span<const Complex> next);

struct UnfoldingFit {
  double exponent = 0.0;
  std::vector<std::size_t> trajectory_ids;
  std::vector<double> coefficients;
  std::vector<double> slopes;
  std::pair<double, double> fit_window{0.0, 0.0};
  /// RMS deviation of log|q| from log c_n + p log t over all fitted points.
  double residual = 0.0;
};

/// Fits log|q_n(t)| = log c_n + p log t on the window; p is the median of
/// per-trajectory least-squares slopes. Values with |Im q| > real_tol or
/// |q| <= real_tol are rejected.
UnfoldingFit unfolding_fit(const SweepResult& sr, std::span<const std::size_t> trajectory_ids,
                           std::pair<double, double> window, double real_tol = 1e-9);

/// det(zI - Q) via the continuant D_k = z D_{k-1} - sub_k sup_k D_{k-2}.
Complex char_poly_at(const LatticeOperator& q, Complex z);

}  // namespace pjb
