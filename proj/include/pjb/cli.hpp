#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pjb/pseudospectrum.hpp"
#include "pjb/spectral.hpp"

namespace pjb {

enum ExitCode : int { kExitOk = 0, kExitDomain = 1, kExitNumerical = 2 };

/// Environment variable that redirects relative output paths.
inline constexpr const char* kOutputDirEnv = "PJB_OUTPUT_DIR";

struct RunConfig {
  /// matrix | sweep | classify | pseudospec | metric | project | phase-table
  std::string command;
  int n = 10;
  std::string word;
  double t = 0.1;
  double t_min = -0.5;
  double t_max = 0.5;
  int steps = 1001;
  double t0 = 0.1;
  GridSpec grid;
  std::vector<double> ladder = default_ladder();
  ClassifyOptions tolerances;
  /// Empty means all ones.
  std::vector<double> kappa;
  /// sqrt | cholesky
  std::string factorization = "sqrt";
  /// svd | inverse-iteration
  std::string sigma_method = "svd";
  /// Empty writes to the provided output stream.
  std::string out;
  /// csv | json
  std::string format = "csv";
  /// pseudospec only: merge report (JSON) and contour polylines (JSON).
  std::string report_out;
  std::string contours_out;
  int threads = 1;
};

/// Throws DomainError on any invalid parameter.
void validate(const RunConfig& cfg);

/// Runs one command. Errors are reported on `err` and mapped to exit codes
/// 1 (domain) and 2 (numerical).
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace pjb
