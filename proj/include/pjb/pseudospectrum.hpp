#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pjb/model.hpp"
#include "pjb/spectral.hpp"

namespace pjb {

/// Uniform closed-interval lattice over a rectangle of the complex plane.
struct GridSpec {
  double re_min = -1.5;
  double re_max = 1.5;
  double im_min = -1.5;
  double im_max = 1.5;
  int nx = 201;
  int ny = 201;

  void validate() const;
  double re_step() const { return (re_max - re_min) / (nx - 1); }
  double im_step() const { return (im_max - im_min) / (ny - 1); }
  double re_at(int ix) const;
  double im_at(int iy) const;
  Complex point(int ix, int iy) const { return {re_at(ix), im_at(iy)}; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  /// Row-major: rows run along the imaginary axis.
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix);
  }
  bool contains(Complex z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
};

struct OperatorDescriptor {
  int n = 0;
  std::string word;
  double t = 0.0;
};

struct ResolventField {
  GridSpec grid;
  /// s(z) = sigma_min(zI - Q), row-major (see GridSpec::index).
  std::vector<double> s_values;
  OperatorDescriptor op;

  double at(int ix, int iy) const { return s_values[grid.index(ix, iy)]; }
};

enum class SigmaMethod { svd, inverse_iteration };

/// Smallest singular value of zI - Q from a full SVD (LAPACK zgesvd) of the
/// dense shift.
double sigma_min_svd(const LatticeOperator& q, Complex z);

/// Inverse iteration on (zI - Q)^{-H} (zI - Q)^{-1} using a pivoted
/// tridiagonal LU. Returns nullopt if the Rayleigh quotient has not settled
/// within the iteration cap.
std::optional<double> sigma_min_inverse_iteration(const LatticeOperator& q, Complex z, int max_iterations = 200);

/// SVD by default; the inverse-iteration path falls back to SVD when it does
/// not converge.
double sigma_min(const LatticeOperator& q, Complex z, SigmaMethod method = SigmaMethod::svd);

struct FieldOptions {
  SigmaMethod method = SigmaMethod::svd;
  int threads = 1;
};

ResolventField resolvent_field(const LatticeOperator& q, const GridSpec& g, const FieldOptions& opts = {});

std::vector<double> default_ladder();

enum class ClusterKind { real, ghost, mixed };

struct EigenCluster {
  std::vector<std::size_t> members;  ///< indices into the spectrum
  std::vector<std::size_t> samples;  ///< nearest grid sample per member
  ClusterKind kind = ClusterKind::real;
};

struct ComponentReport {
  std::vector<double> ladder;
  /// labels[l][sample]: component id of the sample in {s < ladder[l]}, -1 outside.
  std::vector<std::vector<int>> labels;
  /// Grid components plus clusters whose samples are all outside the
  /// region (sub-grid islands around an eigenvalue).
  std::vector<int> component_counts;
  std::vector<EigenCluster> clusters;
  /// Largest ladder epsilon at which clusters i and j lie in distinct
  /// components; 0 if they are merged at every ladder value.
  Eigen::MatrixXd merge_epsilon;
  /// Continuous counterpart: smallest level at which a 4-connected path of
  /// samples joins the two clusters (minimax of s along the path).
  Eigen::MatrixXd saddle_level;
  /// Minimum merge epsilon over (real, ghost) cluster pairs, if both kinds exist.
  std::optional<double> real_ghost_merge_epsilon;
  std::optional<double> real_ghost_saddle;
  /// Some eigenvalue's nearest sample has s >= the smallest ladder value.
  bool low_resolution = false;
  std::vector<std::string> warnings;
};

struct ComponentOptions {
  ClassifyOptions classify;
  /// Eigenvalues closer than this many grid steps share a cluster.
  double cluster_steps = 2.0;
};

/// Labels 4-connected components of {s < eps} for each ladder value and
/// scores pairwise separation of eigenvalue clusters. Throws DomainError if
/// the ladder is not strictly decreasing and positive, or an eigenvalue lies
/// outside the grid.
ComponentReport component_report(const ResolventField& f, std::span<const double> ladder, const Spectrum& eigenvalues,
                                 const ComponentOptions& opts = {});

struct ContourLevel {
  double level = 0.0;
  std::vector<std::vector<Complex>> polylines;
};

/// Marching-squares level sets s = level, chained into polylines. Closed
/// loops repeat their first point at the end.
std::vector<ContourLevel> contours(const ResolventField& f, std::span<const double> levels);

}  // namespace pjb
