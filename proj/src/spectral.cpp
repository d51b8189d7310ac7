#include "pjb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "pjb/errors.hpp"
#include "pjb/parallel.hpp"

namespace pjb {
namespace {

bool complex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::vector<std::size_t> sorted_order(const std::vector<Complex>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return complex_less(values[a], values[b]); });
  return order;
}

// sqrt(|sup_k / sub_k|); 1 when either side vanishes (the block then
// decouples and no rescaling is needed).
double balancing_ratio(double sub, double sup) {
  if (sub == 0.0 || sup == 0.0) return 1.0;
  return std::sqrt(std::abs(sup) / std::abs(sub));
}

Eigen::MatrixXd balanced_matrix(const LatticeOperator& q) {
  const int n = q.n();
  const Eigen::MatrixXd& a = q.dense();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double sub = a(k, k - 1);
    const double sup = a(k - 1, k);
    const double r = balancing_ratio(sub, sup);
    b(k, k - 1) = sub * r;
    b(k - 1, k) = sup / r;
  }
  return b;
}

void normalize_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  const double norm = v.norm();
  if (norm == 0.0) return;
  v /= norm;
  const double cutoff = 1e-12 * v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > cutoff) {
      v *= std::conj(v(i)) / mag;
      v(i) = Complex(mag, 0.0);
      return;
    }
  }
}

double min_pairwise_distance(const std::vector<Complex>& values) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) best = std::min(best, std::abs(values[i] - values[j]));
  }
  return best;
}

// Orders, normalizes, and derives biorthogonal left vectors from the inverse
// of the right-eigenvector matrix.
Eigensystem assemble(const std::vector<Complex>& raw_values, const Eigen::MatrixXcd& raw_right,
                     double scale, double simple_tol) {
  const double gap = min_pairwise_distance(raw_values);
  if (!(gap > simple_tol * std::max(1.0, scale))) {
    std::ostringstream msg;
    msg << "spectrum is not simple (closest eigenvalue pair at distance " << gap
        << "); eigenvectors are not defined";
    throw NumericalError(msg.str());
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(raw_right);
  const Eigen::MatrixXcd inv = lu.inverse();
  if (!inv.allFinite()) throw NumericalError("eigenvector matrix is numerically singular");

  const std::vector<std::size_t> order = sorted_order(raw_values);
  const Eigen::Index n = static_cast<Eigen::Index>(raw_values.size());
  Eigensystem es;
  es.values.resize(raw_values.size());
  es.right.resize(n, n);
  es.left.resize(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const std::size_t src = order[static_cast<std::size_t>(c)];
    es.values[static_cast<std::size_t>(c)] = raw_values[src];
    es.right.col(c) = raw_right.col(static_cast<Eigen::Index>(src));
    es.left.col(c) = inv.row(static_cast<Eigen::Index>(src)).adjoint();
    normalize_phase(es.right.col(c));
    normalize_phase(es.left.col(c));
  }
  return es;
}

}  // namespace

Eigen::VectorXd balancing_scale(const LatticeOperator& q) {
  const int n = q.n();
  const Eigen::MatrixXd& a = q.dense();
  Eigen::VectorXd d(n);
  d(0) = 1.0;
  for (int k = 1; k < n; ++k) d(k) = d(k - 1) * balancing_ratio(a(k, k - 1), a(k - 1, k));
  if (!d.allFinite() || d.minCoeff() <= 0.0) throw NumericalError("balancing scale over/underflows at this t");
  return d;
}

Spectrum eigenvalues(const LatticeOperator& q) {
  if (!q.dense().allFinite()) throw DomainError("operator has non-finite entries");
  const int n = q.n();
  Eigen::EigenSolver<Eigen::MatrixXd> solver;
  solver.setMaxIterations(100 * n);
  solver.compute(balanced_matrix(q), false);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "QR iteration did not converge within " << 100 * n << " sweeps (n=" << n << ", word="
        << q.word().str() << ", t=" << q.t() << ")";
    throw NumericalError(msg.str());
  }
  Spectrum s;
  s.values.assign(solver.eigenvalues().begin(), solver.eigenvalues().end());
  std::sort(s.values.begin(), s.values.end(), complex_less);
  return s;
}

Spectrum eigenvalues(const Eigen::MatrixXcd& a) {
  Spectrum s;
  if (a.rows() == 0) return s;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver;
  solver.setMaxIterations(100 * static_cast<int>(a.rows()));
  solver.compute(a, false);
  if (solver.info() != Eigen::Success) throw NumericalError("complex QR iteration did not converge");
  s.values.assign(solver.eigenvalues().begin(), solver.eigenvalues().end());
  std::sort(s.values.begin(), s.values.end(), complex_less);
  return s;
}

Eigensystem eigensystem(const LatticeOperator& q, double simple_tol) {
  const int n = q.n();
  Eigen::EigenSolver<Eigen::MatrixXd> solver;
  solver.setMaxIterations(100 * n);
  solver.compute(balanced_matrix(q), true);
  if (solver.info() != Eigen::Success) throw NumericalError("QR iteration did not converge");

  const std::vector<Complex> values(solver.eigenvalues().begin(), solver.eigenvalues().end());
  const double gap = min_pairwise_distance(values);
  if (!(gap > simple_tol * std::max(1.0, q.frobenius_norm()))) {
    std::ostringstream msg;
    msg << "spectrum of Q(t=" << q.t() << ", word=" << q.word().str()
        << ") is not simple (closest pair at distance " << gap << "); operator may be defective";
    throw NumericalError(msg.str());
  }
  // Undo the balancing: x = D^{-1} y.
  const Eigen::VectorXd d = balancing_scale(q);
  const Eigen::MatrixXcd right = d.cwiseInverse().cast<Complex>().asDiagonal() * solver.eigenvectors();
  return assemble(values, right, q.frobenius_norm(), simple_tol);
}

Eigensystem eigensystem(const Eigen::MatrixXcd& a, double simple_tol) {
  Eigensystem es;
  if (a.rows() == 0) return es;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver;
  solver.setMaxIterations(100 * static_cast<int>(a.rows()));
  solver.compute(a, true);
  if (solver.info() != Eigen::Success) throw NumericalError("complex QR iteration did not converge");
  const std::vector<Complex> values(solver.eigenvalues().begin(), solver.eigenvalues().end());
  return assemble(values, solver.eigenvectors(), a.norm(), simple_tol);
}

SpectrumClassification classify(const Spectrum& s, double tol_abs, double tol_rel, double scale) {
  if (!(tol_abs > 0.0)) throw DomainError("tol_abs must be positive");
  if (!(tol_rel >= 0.0)) throw DomainError("tol_rel must be non-negative");
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw DomainError("scale must be finite and non-negative");

  SpectrumClassification cls;
  cls.tolerance_used = tol_abs + tol_rel * scale;
  std::vector<Complex> upper;
  std::vector<Complex> lower;
  for (const Complex& q : s.values) {
    if (std::abs(q.imag()) <= cls.tolerance_used) {
      cls.real_eigenvalues.push_back(q.real());
    } else if (q.imag() > 0.0) {
      upper.push_back(q);
    } else {
      lower.push_back(q);
    }
  }
  std::sort(cls.real_eigenvalues.begin(), cls.real_eigenvalues.end());
  if (upper.size() != lower.size()) {
    throw NumericalError("classification failure: " + std::to_string(upper.size()) + " eigenvalues above and " +
                         std::to_string(lower.size()) + " below the real axis cannot be conjugate-paired");
  }
  const double pair_tol = 10.0 * cls.tolerance_used;
  std::vector<bool> used(lower.size(), false);
  for (const Complex& q : upper) {
    std::size_t best = lower.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(std::conj(q) - lower[j]);
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best == lower.size() || best_dist > pair_tol) {
      std::ostringstream msg;
      msg << "classification failure: eigenvalue " << q.real() << "+" << q.imag()
          << "i has no conjugate partner within " << pair_tol << " (borderline exceptional point?)";
      throw NumericalError(msg.str());
    }
    used[best] = true;
    cls.ghost_pairs.push_back(q);
  }
  std::sort(cls.ghost_pairs.begin(), cls.ghost_pairs.end(), complex_less);
  cls.n_real = static_cast<int>(cls.real_eigenvalues.size());
  cls.n_ghost = static_cast<int>(s.size()) - cls.n_real;
  return cls;
}

SpectrumClassification classify(const LatticeOperator& q, const ClassifyOptions& opts) {
  return classify(eigenvalues(q), opts.tol_abs, opts.tol_rel, q.frobenius_norm());
}

std::vector<double> linear_grid(double t_min, double t_max, int steps) {
  if (steps < 2) throw DomainError("grid needs at least 2 points");
  if (!(t_min < t_max) || !std::isfinite(t_min) || !std::isfinite(t_max)) {
    throw DomainError("grid range must satisfy min < max");
  }
  std::vector<double> grid(static_cast<std::size_t>(steps));
  const double span = t_max - t_min;
  for (int i = 0; i < steps; ++i) {
    grid[static_cast<std::size_t>(i)] = t_min + span * (static_cast<double>(i) / (steps - 1));
  }
  grid.back() = t_max;
  return grid;
}

std::vector<std::size_t> match_nearest(std::span<const Complex> prev, std::span<const Complex> next) {
  const std::size_t n = prev.size();
  if (next.size() != n) throw DomainError("cannot match spectra of different sizes");
  struct Candidate {
    double dist;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Candidate> pairs;
  pairs.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) pairs.push_back({std::abs(prev[i] - next[j]), i, j});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  std::vector<std::size_t> perm(n, n);
  std::vector<bool> taken(n, false);
  std::size_t assigned = 0;
  for (const Candidate& c : pairs) {
    if (perm[c.i] != n || taken[c.j]) continue;
    perm[c.i] = c.j;
    taken[c.j] = true;
    if (++assigned == n) break;
  }
  return perm;
}

SweepResult sweep(int n, const Word& w, std::span<const double> t_grid, const SweepOptions& opts) {
  if (t_grid.size() < 2) throw DomainError("sweep needs at least 2 time samples");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("time grid must be strictly increasing");
  }
  // Validate dimensions once before fanning out.
  (void)build_operator(n, w, t_grid.front());

  const std::size_t count = t_grid.size();
  std::vector<Spectrum> spectra(count);
  std::vector<int> counts(count, 0);
  std::vector<char> defective(count, 0);
  std::vector<char> low(count, 0);

  parallel_for(count, opts.threads, [&](std::size_t i) {
    const double t = t_grid[i];
    if (t == 0.0) {
      spectra[i].values.assign(static_cast<std::size_t>(n), Complex(0.0, 0.0));
      counts[i] = n;
      defective[i] = 1;
      return;
    }
    try {
      const LatticeOperator q = build_operator(n, w, t);
      spectra[i] = eigenvalues(q);
      counts[i] = classify(spectra[i], opts.classify.tol_abs, opts.classify.tol_rel, q.frobenius_norm()).n_real;
      low[i] = std::abs(t) < opts.low_confidence_time ? 1 : 0;
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << e.what() << " [sweep sample t=" << t << "]";
      throw NumericalError(msg.str());
    }
  });

  SweepResult sr;
  sr.t_grid.assign(t_grid.begin(), t_grid.end());
  sr.real_count_per_t = counts;
  sr.defective.assign(defective.begin(), defective.end());
  sr.low_confidence.assign(low.begin(), low.end());
  sr.trajectories.assign(static_cast<std::size_t>(n), std::vector<Complex>(count));

  std::vector<Complex> current = spectra[0].values;
  for (std::size_t k = 0; k < current.size(); ++k) sr.trajectories[k][0] = current[k];
  for (std::size_t i = 1; i < count; ++i) {
    const std::vector<std::size_t> perm = match_nearest(current, spectra[i].values);
    for (std::size_t k = 0; k < current.size(); ++k) {
      current[k] = spectra[i].values[perm[k]];
      sr.trajectories[k][i] = current[k];
    }
  }
  return sr;
}

UnfoldingFit unfolding_fit(const SweepResult& sr, std::span<const std::size_t> trajectory_ids,
                           std::pair<double, double> window, double real_tol) {
  const auto [t_min, t_max] = window;
  if (!(t_min > 0.0)) throw DomainError("fit window must lie in t > 0");
  if (!(t_max > t_min)) throw DomainError("fit window must satisfy t_min < t_max");
  if (trajectory_ids.empty()) throw DomainError("no trajectories selected for the fit");

  struct Series {
    std::vector<double> x;
    std::vector<double> y;
  };
  std::vector<Series> series;
  series.reserve(trajectory_ids.size());
  for (std::size_t id : trajectory_ids) {
    if (id >= sr.trajectories.size()) throw DomainError("trajectory id " + std::to_string(id) + " out of range");
    Series s;
    for (std::size_t i = 0; i < sr.t_grid.size(); ++i) {
      const double t = sr.t_grid[i];
      if (t < t_min || t > t_max) continue;
      const Complex q = sr.trajectories[id][i];
      if (std::abs(q.imag()) > real_tol) {
        throw DomainError("trajectory " + std::to_string(id) + " is not real inside the fit window");
      }
      if (std::abs(q.real()) <= real_tol) {
        throw DomainError("trajectory " + std::to_string(id) + " vanishes inside the fit window");
      }
      s.x.push_back(std::log(t));
      s.y.push_back(std::log(std::abs(q.real())));
    }
    if (s.x.size() < 2) throw DomainError("fit window contains fewer than 2 samples");
    series.push_back(std::move(s));
  }

  UnfoldingFit fit;
  fit.trajectory_ids.assign(trajectory_ids.begin(), trajectory_ids.end());
  fit.fit_window = window;
  for (const Series& s : series) {
    const double m = static_cast<double>(s.x.size());
    const double mx = std::accumulate(s.x.begin(), s.x.end(), 0.0) / m;
    const double my = std::accumulate(s.y.begin(), s.y.end(), 0.0) / m;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      sxx += (s.x[i] - mx) * (s.x[i] - mx);
      sxy += (s.x[i] - mx) * (s.y[i] - my);
    }
    fit.slopes.push_back(sxy / sxx);
  }
  std::vector<double> sorted = fit.slopes;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  fit.exponent = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

  double sq = 0.0;
  std::size_t points = 0;
  for (const Series& s : series) {
    double shift = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) shift += s.y[i] - fit.exponent * s.x[i];
    shift /= static_cast<double>(s.x.size());
    fit.coefficients.push_back(std::exp(shift));
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double r = s.y[i] - shift - fit.exponent * s.x[i];
      sq += r * r;
    }
    points += s.x.size();
  }
  fit.residual = std::sqrt(sq / static_cast<double>(points));
  return fit;
}

Complex char_poly_at(const LatticeOperator& q, Complex z) {
  const Eigen::MatrixXd& a = q.dense();
  Complex prev2(1.0, 0.0);
  Complex prev1 = z - a(0, 0);
  for (int k = 1; k < q.n(); ++k) {
    const Complex next = (z - a(k, k)) * prev1 - a(k, k - 1) * a(k - 1, k) * prev2;
    prev2 = prev1;
    prev1 = next;
  }
  return prev1;
}

}  // namespace pjb
