#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aprox/harness/config.hpp"
#include "aprox/models.hpp"
#include "aprox/solver.hpp"

namespace aprox {

/// A configured problem together with what the baselines need.
struct ExperimentProblem {
  ProblemBundle bundle;
  Vector x0;
  /// Gap step shared by every solver so traces are comparable.
  double gap_lambda = 1.0;
  /// Default lambda_init for the warm-start and Armijo linesearches (0: 1/L
  /// and 1 respectively).
  double default_lambda_init = 0.0;
  /// Lower bound on anisotropic backtracking (0: config.lambda_min only).
  double linesearch_floor = 0.0;

  /// Smooth f alone with a Euclidean Lipschitz constant (logistic only).
  std::function<double(const Vector&)> euclid_value;
  std::function<Vector(const Vector&)> euclid_gradient;
  std::optional<double> euclid_L;

  /// Smooth total objective for Armijo descent, when F is smooth.
  std::function<double(const Vector&)> total_value;
  std::function<Vector(const Vector&)> total_gradient;
  Vector total_x0;
  /// Common gap at an Armijo iterate.
  GapOracle total_gap;
};

ExperimentProblem build_experiment_problem(const ExperimentConfig& config);

/// Largest eigenvalue of A^T A / (4 m): Lipschitz constant of the logistic gradient.
double logistic_euclidean_constant(const Matrix& A);

struct RunOutcome {
  std::string solver;
  IterateTrace trace;
  std::string error;  ///< set when the solver could not start
};

/// One named solver ("fixed", "linesearch", "warmstart", "euclidean", "armijo")
/// on the problem; step sizes left at 0 in `config.solver` are derived from L.
RunOutcome run_named_solver(const ExperimentProblem& problem, const ExperimentConfig& config,
                            const std::string& solver);

/// `solve`: config.solver.mode on the problem; writes trace.csv and summary.json.
nlohmann::json run_solve(const ExperimentConfig& config, unsigned workers);
/// `compare`: every solver in config.solvers (or the problem default set);
/// writes <solver>.csv, <solver>.json, plot_data.csv and summary.json.
nlohmann::json run_experiment(const ExperimentConfig& config, unsigned workers);
/// `bench`: warm-start grid over alphas x lambda_inits, selecting the fewest
/// gradient evaluations; writes grid.csv and bench_summary.json.
nlohmann::json run_grid(const ExperimentConfig& config, unsigned workers);
/// `gen`: writes the configured synthetic data set into config.out_dir.
std::string run_generate(const ExperimentConfig& config);

/// Default comparison set per problem type.
std::vector<std::string> default_solvers(const ExperimentConfig& config);

/// Runs `jobs` on up to `workers` threads; job i writes only to its own slot.
void run_parallel(std::size_t jobs, unsigned workers, const std::function<void(std::size_t)>& job);

/// Sinkhorn scaling u <- r / (K^T v), v <- s / (K u) with K = exp(-C/sigma),
/// starting from u = v = 1. Returns (u, v) after every sweep, starting point first.
std::vector<std::pair<Vector, Vector>> sinkhorn_scaling(const Matrix& C, const Vector& r, const Vector& s,
                                                        double sigma, int sweeps);

struct SuiteResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct CheckOptions {
  /// Multiplies every declared smoothness constant in the descent suite
  /// (0.5 reproduces the halved-constant mutation).
  double l_scale = 1.0;
  unsigned workers = 0;
};

/// Suites: legendre, bregman, moreau, descent, sinkhorn, sufficient-decrease;
/// "all" runs every suite. Unknown names throw ConfigError.
std::vector<SuiteResult> check_suites(const std::string& selector, const CheckOptions& options = {});
std::vector<std::string> suite_names();
/// One tab-separated line per suite: name, PASS/FAIL, worst, threshold, detail.
void print_suite_table(std::ostream& os, const std::vector<SuiteResult>& results);

/// Shared toy problems.
ProblemBundle logistic_toy(LogisticRegularization reg, int m = 100, int n = 10, std::uint64_t seed = 0);
/// Fixed 4 x 2 logistic data.
ProblemBundle logistic_tiny(LogisticRegularization reg);
/// Single-observation logistic model (1 x 3) on which L = ||a||^2 is sharp.
ProblemBundle logistic_sharp();
/// Exponential-sum toy with A >= 0 (5 x 3, sigma = 0.5).
ProblemBundle exp_sum_toy(std::uint64_t seed = 0);
/// Lifted exp-LP toy from the synthetic generator.
ProblemBundle lifted_exp_lp_toy(int m, int n, std::uint64_t seed, double sigma);
/// Joint OT dual toy.
ProblemBundle ot_joint_toy(int m, int n, std::uint64_t seed, double sigma);

}  // namespace aprox
