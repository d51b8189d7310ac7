// Command-line front end: builds operators, sweeps spectra through t = 0,
// computes pseudospectra, metrics and ghost-free reduced models, and writes
// CSV/JSON artifacts.

#include <iostream>

#include "CLI11.hpp"
#include "pjb/cli.hpp"

namespace {

void add_common(CLI::App* sub, pjb::RunConfig& cfg, bool with_word) {
  sub->add_option("--n", cfg.n, "matrix dimension N")->capture_default_str();
  if (with_word) sub->add_option("--word", cfg.word, "coupling word over {o,e}, length floor(N/2)")->required();
  sub->add_option("--out", cfg.out, "output path (stdout if omitted; relative paths honour $PJB_OUTPUT_DIR)");
  sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_option("--tol-abs", cfg.tolerances.tol_abs, "absolute real-classification tolerance")
      ->capture_default_str();
  sub->add_option("--tol-rel", cfg.tolerances.tol_rel, "relative tolerance (times ||Q||_F)")->capture_default_str();
  sub->add_option("--threads", cfg.threads, "worker threads (output is independent of this)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perturbed-Jordan-block lattice operators: spectra, pseudospectra, metrics"};
  app.require_subcommand(1);
  pjb::RunConfig cfg;
  std::vector<double> grid;

  auto* matrix = app.add_subcommand("matrix", "export Q(t) as dense CSV or {n, word, t, sub, sup} JSON");
  add_common(matrix, cfg, true);
  matrix->add_option("--t", cfg.t, "time parameter")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "eigenvalue trajectories and real counts over a t grid");
  add_common(sweep, cfg, true);
  sweep->add_option("--t-min", cfg.t_min, "first time sample")->capture_default_str();
  sweep->add_option("--t-max", cfg.t_max, "last time sample")->capture_default_str();
  sweep->add_option("--steps", cfg.steps, "number of time samples")->capture_default_str();

  auto* classify = app.add_subcommand("classify", "spectrum split into real eigenvalues and ghost pairs");
  add_common(classify, cfg, true);
  classify->add_option("--t", cfg.t, "time parameter")->capture_default_str();

  auto* pseudo = app.add_subcommand("pseudospec", "resolvent-norm field s(z) and epsilon-component report");
  add_common(pseudo, cfg, true);
  pseudo->add_option("--t", cfg.t, "time parameter")->capture_default_str();
  pseudo->add_option("--grid", grid, "re_min re_max im_min im_max nx ny")
      ->expected(6)
      ->default_str("-1.5 1.5 -1.5 1.5 201 201");
  pseudo->add_option("--ladder", cfg.ladder, "strictly decreasing epsilon values")
      ->default_str("1e-1 1e-2 1e-3 1e-4 1e-5 1e-6 1e-7 1e-8");
  pseudo->add_option("--sigma-method", cfg.sigma_method, "smallest singular value route")
      ->check(CLI::IsMember({"svd", "inverse-iteration"}))
      ->capture_default_str();
  pseudo->add_option("--report", cfg.report_out, "also write the JSON merge report here");
  pseudo->add_option("--contours", cfg.contours_out, "write level-set polylines (JSON) here");

  auto* metric = app.add_subcommand("metric", "metric Theta(kappa), its factor Omega and the Hermitian image");
  add_common(metric, cfg, true);
  metric->add_option("--t", cfg.t, "time parameter")->capture_default_str();
  metric->add_option("--kappa", cfg.kappa, "N positive weights")->default_str("all ones");
  metric->add_option("--factorization", cfg.factorization, "Omega construction")
      ->check(CLI::IsMember({"sqrt", "cholesky"}))
      ->capture_default_str();

  auto* project = app.add_subcommand("project", "projector onto the real-eigenvalue subspace and reduced model");
  add_common(project, cfg, true);
  project->add_option("--t", cfg.t, "time parameter")->capture_default_str();
  project->add_option("--factorization", cfg.factorization, "Omega_R construction")
      ->check(CLI::IsMember({"sqrt", "cholesky"}))
      ->capture_default_str();

  auto* phase = app.add_subcommand("phase-table", "real counts at -t0 and +t0 for every word");
  add_common(phase, cfg, false);
  phase->add_option("--t0", cfg.t0, "probe time in (0, 1)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pjb::kExitDomain;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (!grid.empty()) {
    cfg.grid.re_min = grid[0];
    cfg.grid.re_max = grid[1];
    cfg.grid.im_min = grid[2];
    cfg.grid.im_max = grid[3];
    cfg.grid.nx = static_cast<int>(grid[4]);
    cfg.grid.ny = static_cast<int>(grid[5]);
    if (grid[4] != cfg.grid.nx || grid[5] != cfg.grid.ny) {
      std::cerr << "error: grid sample counts must be integers\n";
      return pjb::kExitDomain;
    }
  }
  return pjb::run(cfg, std::cout, std::cerr);
}
