#include "pjb/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "pjb/errors.hpp"
#include "pjb/export.hpp"
#include "pjb/metric.hpp"
#include "pjb/model.hpp"
#include "pjb/phase.hpp"

namespace pjb {
namespace {

const std::set<std::string> kCommands{"matrix", "sweep", "classify", "pseudospec", "metric", "project", "phase-table"};

bool needs_word(const std::string& command) { return command != "phase-table"; }

std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) p = std::filesystem::path(dir) / p;
  }
  return p;
}

void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  const std::filesystem::path target = resolve_output(path);
  std::ofstream file(target, std::ios::binary | std::ios::trunc);
  if (!file) throw DomainError("cannot open output file " + target.string());
  file << text;
  if (!file) throw DomainError("failed writing output file " + target.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string describe(const RunConfig& cfg) {
  std::ostringstream s;
  s << "command=" << cfg.command << " n=" << cfg.n;
  if (needs_word(cfg.command)) s << " word=" << cfg.word;
  if (cfg.command == "sweep") {
    s << " t-min=" << cfg.t_min << " t-max=" << cfg.t_max << " steps=" << cfg.steps;
  } else if (cfg.command == "phase-table") {
    s << " t0=" << cfg.t0;
  } else {
    s << " t=" << cfg.t;
  }
  return s.str();
}

std::vector<double> weights(const RunConfig& cfg) {
  return cfg.kappa.empty() ? std::vector<double>(static_cast<std::size_t>(cfg.n), 1.0) : cfg.kappa;
}

std::string run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const bool as_json = cfg.format == "json";
  const int threads = cfg.threads;

  if (cfg.command == "phase-table") {
    const auto rows = classify_all_words(cfg.n, cfg.t0, threads, cfg.tolerances);
    return as_json ? dump(phase_table_json(rows)) : phase_table_csv(rows);
  }

  const Word w = parse_word(cfg.word);
  if (cfg.command == "sweep") {
    SweepOptions opts;
    opts.classify = cfg.tolerances;
    opts.threads = threads;
    const std::vector<double> grid = linear_grid(cfg.t_min, cfg.t_max, cfg.steps);
    const SweepResult sr = sweep(cfg.n, w, grid, opts);
    return as_json ? dump(sweep_json(sr, cfg.n, w)) : sweep_csv(sr);
  }

  const LatticeOperator q = build_operator(cfg.n, w, cfg.t);
  if (cfg.command == "matrix") return as_json ? dump(matrix_json(q)) : matrix_csv(q);

  if (cfg.command == "classify") {
    const Spectrum s = eigenvalues(q);
    const SpectrumClassification cls = classify(s, cfg.tolerances.tol_abs, cfg.tolerances.tol_rel, q.frobenius_norm());
    return as_json ? dump(classification_json(q, s, cls)) : classification_csv(s, cls);
  }

  if (cfg.command == "pseudospec") {
    FieldOptions fopts;
    fopts.method = cfg.sigma_method == "svd" ? SigmaMethod::svd : SigmaMethod::inverse_iteration;
    fopts.threads = threads;
    const ResolventField field = resolvent_field(q, cfg.grid, fopts);
    const Spectrum s = eigenvalues(q);
    ComponentOptions copts;
    copts.classify = cfg.tolerances;
    const ComponentReport rep = component_report(field, cfg.ladder, s, copts);
    for (const std::string& wmsg : rep.warnings) err << "warning: " << wmsg << "\n";
    if (!cfg.report_out.empty()) emit(cfg.report_out, dump(pseudospectrum_json(field, s, rep)), out);
    if (!cfg.contours_out.empty()) {
      const auto levels = contours(field, cfg.ladder);
      emit(cfg.contours_out, dump(contours_json(field, levels)), out);
    }
    return as_json ? dump(pseudospectrum_json(field, s, rep)) : field_csv(field);
  }

  const Factorization factor = cfg.factorization == "cholesky" ? Factorization::cholesky : Factorization::principal_sqrt;
  if (cfg.command == "metric") {
    const std::vector<double> kappa = weights(cfg);
    const MetricSolution m = metric_from_weights(q, kappa);
    const HermitizationResult h = hermitize(q, factor_metric(m.theta, factor));
    return as_json ? dump(metric_json(q, m, &h)) : metric_csv(m);
  }

  // project
  const SpectrumClassification cls = classify(q, cfg.tolerances);
  const ReducedModel rm = real_subspace_projector(q, cls);
  if (rm.reduced_dim == 0) return as_json ? dump(reduced_model_json(q, rm)) : reduced_model_csv(rm);
  const HermitizationResult h = hermitize(rm.q_reduced, factor_metric(rm.theta_reduced, factor));
  return as_json ? dump(reduced_model_json(q, rm, &h)) : reduced_model_csv(rm);
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (!kCommands.contains(cfg.command)) throw DomainError("unknown command '" + cfg.command + "'");
  if (cfg.n < 2) throw DomainError("--n must be >= 2");
  if (cfg.format != "csv" && cfg.format != "json") throw DomainError("--format must be csv or json");
  if (cfg.threads < 1) throw DomainError("--threads must be >= 1");
  if (cfg.factorization != "sqrt" && cfg.factorization != "cholesky") {
    throw DomainError("--factorization must be sqrt or cholesky");
  }
  if (cfg.sigma_method != "svd" && cfg.sigma_method != "inverse-iteration") {
    throw DomainError("--sigma-method must be svd or inverse-iteration");
  }
  if (!(cfg.tolerances.tol_abs > 0.0)) throw DomainError("--tol-abs must be positive");
  if (!(cfg.tolerances.tol_rel >= 0.0)) throw DomainError("--tol-rel must be non-negative");
  if (needs_word(cfg.command)) {
    if (cfg.word.empty()) throw DomainError("--word is required for " + cfg.command);
    const Word w = parse_word(cfg.word);
    if (w.size() != static_cast<std::size_t>(cfg.n / 2)) {
      throw DomainError("word length " + std::to_string(w.size()) + " does not match floor(n/2) = " +
                        std::to_string(cfg.n / 2));
    }
  }
  if (!std::isfinite(cfg.t)) throw DomainError("--t must be finite");
  if (cfg.command == "sweep") (void)linear_grid(cfg.t_min, cfg.t_max, cfg.steps);
  if (cfg.command == "phase-table" && !(cfg.t0 > 0.0 && cfg.t0 < 1.0)) throw DomainError("--t0 must lie in (0, 1)");
  if (cfg.command == "pseudospec") {
    cfg.grid.validate();
    if (cfg.ladder.empty()) throw DomainError("--ladder must not be empty");
    for (std::size_t i = 0; i < cfg.ladder.size(); ++i) {
      if (!(cfg.ladder[i] > 0.0)) throw DomainError("--ladder values must be positive");
      if (i > 0 && !(cfg.ladder[i] < cfg.ladder[i - 1])) throw DomainError("--ladder must be strictly decreasing");
    }
  }
  if (cfg.command == "metric" && !cfg.kappa.empty()) {
    if (cfg.kappa.size() != static_cast<std::size_t>(cfg.n)) throw DomainError("--kappa needs exactly n values");
    for (double k : cfg.kappa) {
      if (!(k > 0.0)) throw DomainError("--kappa values must be positive");
    }
  }
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
    if (cfg.command != "phase-table" && cfg.command != "sweep" && outside_default_range(cfg.t)) {
      err << "warning: |t| = " << std::abs(cfg.t) << " exceeds the default range 0.5\n";
    }
    emit(cfg.out, run_command(cfg, out, err), out);
    return kExitOk;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << " (" << describe(cfg) << ")\n";
    return kExitDomain;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << " (" << describe(cfg) << ")\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << " (" << describe(cfg) << ")\n";
    return kExitNumerical;
  }
}

}  // namespace pjb
