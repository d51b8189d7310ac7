#include "pjb/pseudospectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>

#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "pjb/errors.hpp"
#include "pjb/parallel.hpp"

namespace pjb {

void GridSpec::validate() const {
  if (!(re_min < re_max) || !(im_min < im_max)) throw DomainError("grid ranges must satisfy min < max");
  if (!std::isfinite(re_min) || !std::isfinite(re_max) || !std::isfinite(im_min) || !std::isfinite(im_max)) {
    throw DomainError("grid ranges must be finite");
  }
  if (nx < 2 || ny < 2) throw DomainError("grid needs at least 2 samples per axis");
}

double GridSpec::re_at(int ix) const {
  return ix == nx - 1 ? re_max : re_min + (re_max - re_min) * (static_cast<double>(ix) / (nx - 1));
}

double GridSpec::im_at(int iy) const {
  return iy == ny - 1 ? im_max : im_min + (im_max - im_min) * (static_cast<double>(iy) / (ny - 1));
}

double sigma_min_svd(const LatticeOperator& q, Complex z) {
  const Eigen::Index n = q.n();
  Eigen::MatrixXcd shifted = -q.dense().cast<Complex>();
  shifted.diagonal().array() += z;
  // LAPACK zgesvd: Eigen's complex Jacobi SVD loses relative accuracy on
  // the tiny singular values that dominate pseudospectra.
  std::vector<double> sv(static_cast<std::size_t>(n));
  std::vector<double> superb(static_cast<std::size_t>(std::max<Eigen::Index>(n - 1, 1)));
  const lapack_int info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'N', 'N', static_cast<lapack_int>(n),
                                         static_cast<lapack_int>(n), shifted.data(), static_cast<lapack_int>(n),
                                         sv.data(), nullptr, 1, nullptr, 1, superb.data());
  if (info != 0) throw NumericalError("zgesvd failed with info " + std::to_string(info));
  return sv.back();
}

namespace {

// Pivoted LU of a complex tridiagonal matrix (LAPACK gttrf layout).
struct TridiagonalLU {
  std::vector<Complex> dl;   // multipliers
  std::vector<Complex> d;    // U diagonal
  std::vector<Complex> du;   // U first superdiagonal
  std::vector<Complex> du2;  // U second superdiagonal (fill-in from pivoting)
  std::vector<bool> swapped;
  bool singular = false;

  TridiagonalLU(const LatticeOperator& q, Complex z) {
    const int n = q.n();
    const Eigen::MatrixXd& a = q.dense();
    d.assign(static_cast<std::size_t>(n), z);
    dl.resize(static_cast<std::size_t>(n - 1));
    du.resize(static_cast<std::size_t>(n - 1));
    du2.assign(static_cast<std::size_t>(std::max(n - 2, 0)), Complex(0.0));
    swapped.assign(static_cast<std::size_t>(n - 1), false);
    for (int i = 0; i + 1 < n; ++i) {
      d[static_cast<std::size_t>(i)] = z - a(i, i);
      dl[static_cast<std::size_t>(i)] = -a(i + 1, i);
      du[static_cast<std::size_t>(i)] = -a(i, i + 1);
    }
    d[static_cast<std::size_t>(n - 1)] = z - a(n - 1, n - 1);

    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == Complex(0.0)) {
          singular = true;
          return;
        }
        const Complex fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        const Complex fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const Complex temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < d.size()) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = true;
      }
    }
    if (d.back() == Complex(0.0)) singular = true;
  }

  // b <- A^{-1} b
  void solve(std::vector<Complex>& b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) std::swap(b[i], b[i + 1]);
      b[i + 1] -= dl[i] * b[i];
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t k = n - 2; k-- > 0;) b[k] = (b[k] - du[k] * b[k + 1] - du2[k] * b[k + 2]) / d[k];
  }

  // b <- A^{-H} b
  void solve_adjoint(std::vector<Complex>& b) const {
    const std::size_t n = d.size();
    b[0] /= std::conj(d[0]);
    if (n > 1) b[1] = (b[1] - std::conj(du[0]) * b[0]) / std::conj(d[1]);
    for (std::size_t i = 2; i < n; ++i) {
      b[i] = (b[i] - std::conj(du[i - 1]) * b[i - 1] - std::conj(du2[i - 2]) * b[i - 2]) / std::conj(d[i]);
    }
    for (std::size_t i = n - 1; i-- > 0;) {
      if (!swapped[i]) {
        b[i] -= std::conj(dl[i]) * b[i + 1];
      } else {
        const Complex temp = b[i + 1];
        b[i + 1] = b[i] - std::conj(dl[i]) * temp;
        b[i] = temp;
      }
    }
  }
};

double norm2(const std::vector<Complex>& v) {
  double sum = 0.0;
  for (const Complex& c : v) sum += std::norm(c);
  return std::sqrt(sum);
}

}  // namespace

std::optional<double> sigma_min_inverse_iteration(const LatticeOperator& q, Complex z, int max_iterations) {
  const TridiagonalLU lu(q, z);
  if (lu.singular) return 0.0;

  const std::size_t n = static_cast<std::size_t>(q.n());
  std::vector<Complex> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::polar(1.0 + 0.5 * std::sin(1.3 * static_cast<double>(i)), 0.7 * i);
  double nv = norm2(v);
  for (auto& c : v) c /= nv;

  double rho_prev = 0.0;
  double delta_prev = 0.0;
  for (int k = 0; k < max_iterations; ++k) {
    lu.solve(v);
    const double rho = [&] {
      const double nw = norm2(v);
      return nw * nw;
    }();
    if (!std::isfinite(rho)) return 0.0;
    lu.solve_adjoint(v);
    nv = norm2(v);
    if (!std::isfinite(nv) || nv == 0.0) return 0.0;
    for (auto& c : v) c /= nv;

    // rho is the Rayleigh quotient of (A^H A)^{-1}; it increases
    // monotonically towards 1 / sigma_min^2.
    const double delta = rho - rho_prev;
    if (k >= 2) {
      const double tiny = 1e-15 * rho;
      if (std::abs(delta) <= tiny) return 1.0 / std::sqrt(rho);
      if (delta > 0.0 && delta_prev > 0.0) {
        const double ratio = delta / delta_prev;
        if (ratio < 1.0 && delta * ratio / (1.0 - ratio) <= 1e-14 * rho) return 1.0 / std::sqrt(rho);
      }
    }
    rho_prev = rho;
    delta_prev = delta;
  }
  return std::nullopt;
}

double sigma_min(const LatticeOperator& q, Complex z, SigmaMethod method) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("shift z must be finite");
  if (method == SigmaMethod::inverse_iteration) {
    if (auto fast = sigma_min_inverse_iteration(q, z)) return *fast;
  }
  return sigma_min_svd(q, z);
}

ResolventField resolvent_field(const LatticeOperator& q, const GridSpec& g, const FieldOptions& opts) {
  g.validate();
  ResolventField f;
  f.grid = g;
  f.op = {q.n(), q.word().str(), q.t()};
  f.s_values.assign(g.size(), 0.0);
  parallel_for(g.size(), opts.threads, [&](std::size_t idx) {
    const int ix = static_cast<int>(idx % static_cast<std::size_t>(g.nx));
    const int iy = static_cast<int>(idx / static_cast<std::size_t>(g.nx));
    f.s_values[idx] = sigma_min(q, g.point(ix, iy), opts.method);
  });
  return f;
}

std::vector<double> default_ladder() {
  std::vector<double> ladder;
  for (int k = 1; k <= 8; ++k) ladder.push_back(std::pow(10.0, -k));
  return ladder;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

// 4-connected labelling of {s < eps}; returns the number of components.
int label_components(const ResolventField& f, double eps, std::vector<int>& labels) {
  const GridSpec& g = f.grid;
  labels.assign(g.size(), -1);
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (labels[start] != -1 || !(f.s_values[start] < eps)) continue;
    labels[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      const int ix = static_cast<int>(p % static_cast<std::size_t>(g.nx));
      const int iy = static_cast<int>(p / static_cast<std::size_t>(g.nx));
      const int nbr[4][2] = {{ix - 1, iy}, {ix + 1, iy}, {ix, iy - 1}, {ix, iy + 1}};
      for (const auto& [jx, jy] : nbr) {
        if (jx < 0 || jy < 0 || jx >= g.nx || jy >= g.ny) continue;
        const std::size_t r = g.index(jx, jy);
        if (labels[r] == -1 && f.s_values[r] < eps) {
          labels[r] = next;
          stack.push_back(r);
        }
      }
    }
    ++next;
  }
  return next;
}

std::size_t nearest_sample(const GridSpec& g, Complex z) {
  const auto clamp_round = [](double x, int hi) { return std::clamp(static_cast<int>(std::lround(x)), 0, hi); };
  const int ix = clamp_round((z.real() - g.re_min) / g.re_step(), g.nx - 1);
  const int iy = clamp_round((z.imag() - g.im_min) / g.im_step(), g.ny - 1);
  return g.index(ix, iy);
}

}  // namespace

ComponentReport component_report(const ResolventField& f, std::span<const double> ladder, const Spectrum& eigenvalues,
                                 const ComponentOptions& opts) {
  if (ladder.empty()) throw DomainError("epsilon ladder is empty");
  for (std::size_t l = 0; l < ladder.size(); ++l) {
    if (!(ladder[l] > 0.0)) throw DomainError("epsilon ladder values must be positive");
    if (l > 0 && !(ladder[l] < ladder[l - 1])) throw DomainError("epsilon ladder must be strictly decreasing");
  }
  const GridSpec& g = f.grid;
  for (const Complex& q : eigenvalues.values) {
    if (!g.contains(q)) {
      std::ostringstream msg;
      msg << "eigenvalue " << q.real() << (q.imag() < 0 ? "" : "+") << q.imag() << "i lies outside the grid";
      throw DomainError(msg.str());
    }
  }

  ComponentReport rep;
  rep.ladder.assign(ladder.begin(), ladder.end());

  // Pre-merge eigenvalues closer than cluster_steps grid steps.
  const std::size_t m = eigenvalues.size();
  const double merge_radius = opts.cluster_steps * std::max(g.re_step(), g.im_step());
  DisjointSets eig_sets(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (std::abs(eigenvalues.values[i] - eigenvalues.values[j]) < merge_radius) eig_sets.unite(i, j);
    }
  }
  std::vector<std::size_t> cluster_of(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t root = eig_sets.find(i);
    if (cluster_of[root] == m) {
      cluster_of[root] = rep.clusters.size();
      rep.clusters.emplace_back();
    }
    EigenCluster& c = rep.clusters[cluster_of[root]];
    c.members.push_back(i);
    c.samples.push_back(nearest_sample(g, eigenvalues.values[i]));
  }
  for (EigenCluster& c : rep.clusters) {
    bool any_real = false;
    bool any_ghost = false;
    for (std::size_t i : c.members) {
      (std::abs(eigenvalues.values[i].imag()) <= opts.classify.tol_abs ? any_real : any_ghost) = true;
    }
    c.kind = any_real && any_ghost ? ClusterKind::mixed : (any_real ? ClusterKind::real : ClusterKind::ghost);
    for (std::size_t s : c.samples) {
      if (f.s_values[s] >= ladder.back()) rep.low_resolution = true;
    }
  }
  if (rep.low_resolution) {
    rep.warnings.push_back(
        "grid resolution too coarse for the smallest ladder epsilon: some eigenvalue's nearest sample has "
        "s >= eps; such eigenvalues are treated as isolated sub-grid islands at those eps");
  }

  const std::size_t k = rep.clusters.size();
  rep.merge_epsilon = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  Eigen::MatrixXi decided = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  rep.labels.resize(ladder.size());
  for (std::size_t l = 0; l < ladder.size(); ++l) {
    std::vector<int>& labels = rep.labels[l];
    int count = label_components(f, ladder[l], labels);
    std::vector<std::vector<int>> comps(k);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t s : rep.clusters[c].samples) {
        if (labels[s] >= 0) comps[c].push_back(labels[s]);
      }
      if (comps[c].empty()) ++count;
    }
    rep.component_counts.push_back(count);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        const auto ia = static_cast<Eigen::Index>(a);
        const auto ib = static_cast<Eigen::Index>(b);
        if (decided(ia, ib)) continue;
        bool shared = false;
        for (int x : comps[a]) shared = shared || std::find(comps[b].begin(), comps[b].end(), x) != comps[b].end();
        if (!shared) {
          rep.merge_epsilon(ia, ib) = rep.merge_epsilon(ib, ia) = ladder[l];
          decided(ia, ib) = decided(ib, ia) = 1;
        }
      }
    }
  }

  // Minimax path levels: add samples in ascending s and record when two
  // clusters first share a component.
  rep.saddle_level = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  {
    std::vector<std::size_t> order(g.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return f.s_values[a] < f.s_values[b]; });
    DisjointSets sets(g.size());
    std::vector<char> active(g.size(), 0);
    Eigen::MatrixXi joined = Eigen::MatrixXi::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    std::size_t remaining = k * (k - 1) / 2;
    for (std::size_t p : order) {
      if (remaining == 0) break;
      active[p] = 1;
      const int ix = static_cast<int>(p % static_cast<std::size_t>(g.nx));
      const int iy = static_cast<int>(p / static_cast<std::size_t>(g.nx));
      const int nbr[4][2] = {{ix - 1, iy}, {ix + 1, iy}, {ix, iy - 1}, {ix, iy + 1}};
      bool changed = false;
      for (const auto& [jx, jy] : nbr) {
        if (jx < 0 || jy < 0 || jx >= g.nx || jy >= g.ny) continue;
        const std::size_t r = g.index(jx, jy);
        if (active[r]) changed = sets.unite(p, r) || changed;
      }
      bool touches_cluster = false;
      for (const EigenCluster& c : rep.clusters) {
        touches_cluster = touches_cluster || std::find(c.samples.begin(), c.samples.end(), p) != c.samples.end();
      }
      if (!changed && !touches_cluster) continue;
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
          const auto ia = static_cast<Eigen::Index>(a);
          const auto ib = static_cast<Eigen::Index>(b);
          if (joined(ia, ib)) continue;
          bool together = false;
          for (std::size_t sa : rep.clusters[a].samples) {
            if (!active[sa]) continue;
            for (std::size_t sb : rep.clusters[b].samples) {
              together = together || (active[sb] && sets.find(sa) == sets.find(sb));
            }
          }
          if (together) {
            joined(ia, ib) = joined(ib, ia) = 1;
            rep.saddle_level(ia, ib) = rep.saddle_level(ib, ia) = f.s_values[p];
            --remaining;
          }
        }
      }
    }
  }

  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      const ClusterKind ka = rep.clusters[a].kind;
      const ClusterKind kb = rep.clusters[b].kind;
      const bool mixed_self = a == b && ka == ClusterKind::mixed;
      const bool real_ghost = a != b && ka == ClusterKind::real && kb != ClusterKind::real;
      if (!mixed_self && !real_ghost) continue;
      const auto ia = static_cast<Eigen::Index>(a);
      const auto ib = static_cast<Eigen::Index>(b);
      // A mixed cluster puts a real and a ghost eigenvalue below grid resolution.
      const double merge = mixed_self ? 0.0 : rep.merge_epsilon(ia, ib);
      const double saddle = mixed_self ? 0.0 : rep.saddle_level(ia, ib);
      rep.real_ghost_merge_epsilon = std::min(rep.real_ghost_merge_epsilon.value_or(merge), merge);
      rep.real_ghost_saddle = std::min(rep.real_ghost_saddle.value_or(saddle), saddle);
    }
  }
  return rep;
}

}  // namespace pjb
