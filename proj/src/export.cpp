#include "pjb/export.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace pjb {
namespace {

json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json complex_list(std::span<const Complex> values) {
  json out = json::array();
  for (const Complex& c : values) out.push_back({c.real(), c.imag()});
  return out;
}

json operator_json(int n, const std::string& word, double t) {
  return json{{"n", n}, {"word", word}, {"t", t}};
}

std::string complex_matrix_csv(const Eigen::MatrixXcd& m) {
  std::string out = "row,col,re,im\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out += std::to_string(i) + "," + std::to_string(j) + "," + format_double(m(i, j).real()) + "," +
             format_double(m(i, j).imag()) + "\n";
    }
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void put_matrix(json& out, const std::string& key, const Eigen::MatrixXcd& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  }
  out[key] = std::move(re);
  out[key + "_imag"] = std::move(im);
}

json matrix_json(const LatticeOperator& q) {
  return json{{"schema_version", kSchemaVersion}, {"n", q.n()},
              {"word", q.word().str()},           {"t", q.t()},
              {"sub", vector_json(q.sub())},      {"sup", vector_json(q.sup())}};
}

std::string matrix_csv(const LatticeOperator& q) {
  std::string out;
  const Eigen::MatrixXd& a = q.dense();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) out += ',';
      out += format_double(a(i, j));
    }
    out += '\n';
  }
  return out;
}

json sweep_json(const SweepResult& sr, int n, const Word& w) {
  json out{{"schema_version", kSchemaVersion}, {"n", n}, {"word", w.str()}, {"t_grid", sr.t_grid}};
  json traj = json::array();
  for (const auto& path : sr.trajectories) traj.push_back(complex_list(path));
  out["trajectories"] = std::move(traj);
  out["real_count_per_t"] = sr.real_count_per_t;
  out["defective"] = sr.defective;
  out["low_confidence"] = sr.low_confidence;
  return out;
}

std::string sweep_csv(const SweepResult& sr) {
  std::string out = "t";
  for (std::size_t k = 1; k <= sr.trajectories.size(); ++k) {
    out += ",re_q" + std::to_string(k) + ",im_q" + std::to_string(k);
  }
  out += ",n_real\n";
  for (std::size_t i = 0; i < sr.t_grid.size(); ++i) {
    out += format_double(sr.t_grid[i]);
    for (const auto& path : sr.trajectories) {
      out += "," + format_double(path[i].real()) + "," + format_double(path[i].imag());
    }
    out += "," + std::to_string(sr.real_count_per_t[i]) + "\n";
  }
  return out;
}

json classification_json(const LatticeOperator& q, const Spectrum& s, const SpectrumClassification& cls) {
  json out{{"schema_version", kSchemaVersion}, {"operator", operator_json(q.n(), q.word().str(), q.t())}};
  out["eigenvalues"] = complex_list(s.values);
  out["real_eigenvalues"] = cls.real_eigenvalues;
  out["ghost_pairs"] = complex_list(cls.ghost_pairs);
  out["n_real"] = cls.n_real;
  out["n_ghost"] = cls.n_ghost;
  out["tolerance_used"] = cls.tolerance_used;
  return out;
}

std::string classification_csv(const Spectrum& s, const SpectrumClassification& cls) {
  std::string out = "re,im,kind\n";
  for (const Complex& q : s.values) {
    const bool real = std::abs(q.imag()) <= cls.tolerance_used;
    out += format_double(q.real()) + "," + format_double(real ? 0.0 : q.imag()) + "," + (real ? "real" : "ghost") +
           "\n";
  }
  return out;
}

std::string field_csv(const ResolventField& f) {
  std::string out = "re_z,im_z,s\n";
  const GridSpec& g = f.grid;
  out.reserve(g.size() * 64);
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      out += format_double(g.re_at(ix)) + "," + format_double(g.im_at(iy)) + "," + format_double(f.at(ix, iy)) + "\n";
    }
  }
  return out;
}

json pseudospectrum_json(const ResolventField& f, const Spectrum& s, const ComponentReport& rep) {
  const GridSpec& g = f.grid;
  json out{{"schema_version", kSchemaVersion}, {"operator", operator_json(f.op.n, f.op.word, f.op.t)}};
  out["grid"] = json{{"re_min", g.re_min}, {"re_max", g.re_max}, {"im_min", g.im_min},
                     {"im_max", g.im_max}, {"nx", g.nx},         {"ny", g.ny}};
  out["ladder"] = rep.ladder;
  out["eigenvalues"] = complex_list(s.values);
  json clusters = json::array();
  for (const EigenCluster& c : rep.clusters) {
    const char* kind = c.kind == ClusterKind::real ? "real" : (c.kind == ClusterKind::ghost ? "ghost" : "mixed");
    clusters.push_back(json{{"members", c.members}, {"kind", kind}});
  }
  out["clusters"] = std::move(clusters);
  json merge = json::array();
  json saddle = json::array();
  for (Eigen::Index i = 0; i < rep.merge_epsilon.rows(); ++i) {
    merge.push_back(vector_json(rep.merge_epsilon.row(i).transpose()));
    saddle.push_back(vector_json(rep.saddle_level.row(i).transpose()));
  }
  out["merge_epsilon"] = std::move(merge);
  out["saddle_level"] = std::move(saddle);
  out["real_ghost_merge_epsilon"] = rep.real_ghost_merge_epsilon ? json(*rep.real_ghost_merge_epsilon) : json(nullptr);
  out["real_ghost_saddle"] = rep.real_ghost_saddle ? json(*rep.real_ghost_saddle) : json(nullptr);
  out["component_counts"] = rep.component_counts;
  out["low_resolution"] = rep.low_resolution;
  out["warnings"] = rep.warnings;
  out["s_values"] = f.s_values;
  return out;
}

json contours_json(const ResolventField& f, std::span<const ContourLevel> levels) {
  json out{{"schema_version", kSchemaVersion}, {"operator", operator_json(f.op.n, f.op.word, f.op.t)}};
  json lv = json::array();
  for (const ContourLevel& c : levels) {
    json lines = json::array();
    for (const auto& line : c.polylines) lines.push_back(complex_list(line));
    lv.push_back(json{{"epsilon", c.level}, {"polylines", std::move(lines)}});
  }
  out["levels"] = std::move(lv);
  return out;
}

json metric_json(const LatticeOperator& q, const MetricSolution& m, const HermitizationResult* h) {
  json out{{"schema_version", kSchemaVersion}, {"n", q.n()}, {"word", q.word().str()}, {"t", q.t()},
           {"kappa", m.kappa}};
  put_matrix(out, "theta", m.theta);
  out["residual"] = m.residual;
  out["min_eigenvalue"] = m.min_eigenvalue;
  out["condition_number"] = number(m.condition_number);
  out["positive_definite"] = m.positive_definite;
  if (h) {
    put_matrix(out, "omega", h->omega);
    put_matrix(out, "q_image", h->q_image);
    out["hermiticity_residual"] = h->hermiticity_residual;
    out["isospectral_residual"] = h->isospectral_residual;
    out["omega_condition"] = number(h->omega_condition);
  }
  return out;
}

std::string metric_csv(const MetricSolution& m) { return complex_matrix_csv(m.theta); }

json phase_table_json(std::span<const PhaseTableRow> rows) {
  json out{{"schema_version", kSchemaVersion}};
  json list = json::array();
  for (const PhaseTableRow& r : rows) {
    list.push_back(json{{"index", r.index},
                        {"word", r.word.str()},
                        {"n_real_before", r.n_real_before},
                        {"n_real_after", r.n_real_after},
                        {"t0", r.t0}});
  }
  out["rows"] = std::move(list);
  return out;
}

std::string phase_table_csv(std::span<const PhaseTableRow> rows) {
  std::string out = "index,word,n_real_before,n_real_after,t0\n";
  for (const PhaseTableRow& r : rows) {
    out += std::to_string(r.index) + "," + r.word.str() + "," + std::to_string(r.n_real_before) + "," +
           std::to_string(r.n_real_after) + "," + format_double(r.t0) + "\n";
  }
  return out;
}

json reduced_model_json(const LatticeOperator& q, const ReducedModel& rm, const HermitizationResult* h) {
  json out{{"schema_version", kSchemaVersion}, {"operator", operator_json(q.n(), q.word().str(), q.t())}};
  out["reduced_dim"] = rm.reduced_dim;
  out["real_eigenvalues"] = rm.real_eigenvalues;
  put_matrix(out, "projector", rm.projector);
  put_matrix(out, "basis", rm.basis);
  put_matrix(out, "q_reduced", rm.q_reduced);
  put_matrix(out, "theta_reduced", rm.theta_reduced);
  out["residuals"] = json{{"idempotency", rm.idempotency_residual},
                          {"commutation", rm.commutation_residual},
                          {"metric", rm.metric_residual}};
  if (h) {
    put_matrix(out, "omega_reduced", h->omega);
    put_matrix(out, "q_image", h->q_image);
    out["hermiticity_residual"] = h->hermiticity_residual;
    out["isospectral_residual"] = h->isospectral_residual;
  }
  return out;
}

std::string reduced_model_csv(const ReducedModel& rm) { return complex_matrix_csv(rm.projector); }

}  // namespace pjb
