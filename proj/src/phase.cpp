#include "pjb/phase.hpp"

#include <cmath>
#include <sstream>

#include "pjb/errors.hpp"
#include "pjb/parallel.hpp"

namespace pjb {

std::vector<PhaseTableRow> classify_all_words(int n, double t0, int threads, const ClassifyOptions& opts) {
  if (n < 2) throw DomainError("dimension must be >= 2");
  if (!(t0 > 0.0 && t0 < 1.0)) throw DomainError("probe time t0 must lie in (0, 1)");
  const std::size_t length = static_cast<std::size_t>(n / 2);
  if (length > 20) throw DomainError("word enumeration limited to J <= 20");
  const std::size_t count = std::size_t{1} << length;

  std::vector<PhaseTableRow> rows(count);
  parallel_for(count, threads, [&](std::size_t i) {
    PhaseTableRow& row = rows[i];
    row.index = i;
    row.word = word_from_index(length, i);
    row.t0 = t0;
    try {
      row.n_real_before = classify(build_operator(n, row.word, -t0), opts).n_real;
      row.n_real_after = classify(build_operator(n, row.word, t0), opts).n_real;
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " [word index " + std::to_string(i) + " (" + row.word.str() + ")]");
    }
  });
  return rows;
}

DefectivenessCertificate defectiveness(const LatticeOperator& q, Complex z, double cluster_tol) {
  DefectivenessCertificate cert;
  cert.t = q.t();
  cert.z = z;
  const int n = q.n();
  Eigen::MatrixXcd shifted = q.dense().cast<Complex>();
  shifted.diagonal().array() -= z;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
  const double norm_q = Eigen::JacobiSVD<Eigen::MatrixXd>(q.dense()).singularValues()(0);
  const double cutoff = 1e-10 * norm_q;
  const Eigen::VectorXd& sv = svd.singularValues();
  cert.rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) cert.rank += sv(i) > cutoff ? 1 : 0;
  cert.geometric_multiplicity = n - cert.rank;
  for (const Complex& value : eigenvalues(q).values) {
    cert.algebraic_multiplicity += std::abs(value - z) <= cluster_tol ? 1 : 0;
  }
  return cert;
}

ReducedModel real_subspace_projector(const LatticeOperator& q, const SpectrumClassification& cls) {
  const Eigen::Index n = q.n();
  const Eigensystem es = eigensystem(q);

  std::vector<Eigen::Index> real_cols;
  for (std::size_t c = 0; c < es.values.size(); ++c) {
    if (std::abs(es.values[c].imag()) <= cls.tolerance_used) real_cols.push_back(static_cast<Eigen::Index>(c));
  }
  if (static_cast<int>(real_cols.size()) != cls.n_real) {
    std::ostringstream msg;
    msg << "classification reports " << cls.n_real << " real eigenvalues but the eigensystem has "
        << real_cols.size() << " within tolerance " << cls.tolerance_used;
    throw DomainError(msg.str());
  }

  ReducedModel rm;
  rm.reduced_dim = cls.n_real;
  rm.projector = Eigen::MatrixXcd::Zero(n, n);
  const auto dim = static_cast<Eigen::Index>(real_cols.size());
  Eigen::MatrixXcd vectors(n, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Eigen::Index c = real_cols[static_cast<std::size_t>(k)];
    const Eigen::VectorXcd x = es.right.col(c);
    const Eigen::VectorXcd psi = es.left.col(c);
    const Complex overlap = psi.dot(x);  // psi^H x
    if (std::abs(overlap) == 0.0) throw NumericalError("left and right eigenvectors are orthogonal (defective?)");
    rm.projector += x * psi.adjoint() / overlap;
    vectors.col(k) = x;
    rm.real_eigenvalues.push_back(es.values[static_cast<std::size_t>(c)].real());
  }

  // Newton refinement towards idempotency; P stays a polynomial in itself so
  // it keeps commuting with Q.
  Eigen::MatrixXcd p2 = rm.projector * rm.projector;
  rm.idempotency_residual = (p2 - rm.projector).norm();
  for (int iter = 0; iter < 4 && rm.idempotency_residual > 0.0; ++iter) {
    const Eigen::MatrixXcd next = 3.0 * p2 - 2.0 * p2 * rm.projector;
    const Eigen::MatrixXcd next2 = next * next;
    const double residual = (next2 - next).norm();
    if (!(residual < rm.idempotency_residual)) break;
    rm.projector = next;
    p2 = next2;
    rm.idempotency_residual = residual;
  }

  const Eigen::MatrixXcd qc = q.dense().cast<Complex>();
  rm.commutation_residual = (qc * rm.projector - rm.projector * qc).norm();
  if (dim == 0) {
    rm.basis = Eigen::MatrixXcd(n, 0);
    rm.q_reduced = Eigen::MatrixXcd(0, 0);
    rm.theta_reduced = Eigen::MatrixXcd(0, 0);
    return rm;
  }

  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(vectors);
  rm.basis = qr.householderQ() * Eigen::MatrixXcd::Identity(n, dim);
  // Fix the column phases so the first non-negligible component is positive.
  for (Eigen::Index k = 0; k < dim; ++k) {
    auto col = rm.basis.col(k);
    const double cutoff = 1e-12 * col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mag = std::abs(col(i));
      if (mag > cutoff) {
        col *= std::conj(col(i)) / mag;
        col(i) = Complex(mag, 0.0);
        break;
      }
    }
  }
  rm.q_reduced = rm.basis.adjoint() * qc * rm.basis;

  const std::vector<double> ones(static_cast<std::size_t>(dim), 1.0);
  const MetricSolution metric = metric_from_weights(rm.q_reduced, ones);
  rm.theta_reduced = metric.theta;
  rm.metric_residual = metric.residual;
  rm.theta_min_eigenvalue = metric.min_eigenvalue;
  return rm;
}

HermitizationResult reduced_hermitize(const ReducedModel& rm) {
  if (rm.reduced_dim < 1) throw DomainError("reduced model is empty; nothing to Hermitize");
  return hermitize(rm.q_reduced, factor_metric(rm.theta_reduced));
}

}  // namespace pjb
