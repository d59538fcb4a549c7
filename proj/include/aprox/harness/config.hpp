#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aprox/solver.hpp"

namespace aprox {

/// Everything a CLI run needs. Read from an INI-style file:
///
///   [problem]  type (logistic | exp_lp | ot), data (LIBSVM path, logistic only),
///              m, n, seed, reg (none | l1 | sql2), nu, sigma, epsilon,
///              reference (symlog | euclidean, logistic only), rescale (true | false)
///   [solver]   mode (fixed | linesearch | warmstart), lambda, lambda_max,
///              lambda_init, alpha, lambda_min, tau, max_iter, gap_tol, gap_lambda,
///              domain_policy (clamp | strict)
///   [compare]  solvers (comma list of fixed, linesearch, warmstart, euclidean, armijo)
///   [grid]     alphas, lambda_inits (comma lists)
///   [output]   dir, timing (none | wall)
///
/// Step sizes left at 0 are filled in from the problem's smoothness constant.
struct ExperimentConfig {
  std::string problem = "logistic";
  std::string data;
  int m = 100;
  int n = 10;
  std::uint64_t seed = 0;
  std::string reg = "l1";
  double nu = 0.01;
  double sigma = 0.001;
  double epsilon = 1e-8;
  std::string reference;
  bool rescale = true;

  SolverConfig solver;
  std::vector<std::string> solvers;
  std::vector<double> grid_alphas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> grid_lambda_inits{1.0, 5.0, 10.0, 15.0};

  std::string out_dir = "out";
  bool wall_time = false;

  /// Throws ConfigError on invalid values.
  void validate() const;
  nlohmann::json to_json() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Help text listing every key.
std::string config_reference();

}  // namespace aprox
