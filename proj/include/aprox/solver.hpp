#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aprox/numeric.hpp"
#include "aprox/prox.hpp"
#include "aprox/reference.hpp"

namespace aprox {

/// The smooth part f, anisotropically smooth relative to `reference` with
/// constant L (when known).
struct SmoothObjective {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  ReferenceFunction reference;
  std::optional<double> L;
  bool convex = false;

  Index dim() const { return reference.dim(); }
};

enum class DomainPolicy {
  clamp,   ///< pull gradients sitting on the boundary of dom phi* inside by eta and count it
  strict,  ///< any gradient outside int dom phi* is an error
};

struct SolverConfig {
  enum class Mode { fixed, linesearch, linesearch_warmstart };

  Mode mode = Mode::fixed;
  /// Fixed step; 0 means 1/L.
  double lambda = 0.0;
  /// Linesearch start (and warm-start cap; 0 = uncapped for warm start).
  double lambda_max = 0.0;
  /// Warm-start initial trial step.
  double lambda_init = 0.0;
  double alpha = 0.5;
  /// Backtracking safeguard: the smallest step that is still tried.
  double lambda_min = 1e-12;
  int max_iter = 10000;
  /// Stop once gap <= gap_tol * (1 + |F|). Zero disables the test.
  double gap_tol = 1e-9;
  /// Step size at which the trace gap is measured; 0 means the mode default
  /// (lambda, lambda_max or lambda_init).
  double gap_lambda = 0.0;
  DomainPolicy domain_policy = DomainPolicy::clamp;
  double clamp_eta = 1e-12;
  /// How far outside the conjugate domain a gradient may land and still be clamped.
  double clamp_tolerance = 1e-12;
  bool keep_iterates = false;
  /// Armijo sufficient-decrease parameter (run_armijo_gd only).
  double tau = 1e-4;

  /// Resolved fixed step (lambda, or 1/L when lambda is 0).
  double fixed_step(std::optional<double> L) const;
  /// Throws ConfigError on out-of-range parameters.
  void validate(std::optional<double> L) const;
};

const char* mode_name(SolverConfig::Mode mode);
SolverConfig::Mode parse_mode(const std::string& name);

struct TraceRecord {
  int k = 0;
  double F = 0.0;
  double gap = 0.0;
  /// Step used to leave x^k; 0 on the terminal record.
  double lambda = 0.0;
  long grad_evals = 0;
  double time_s = 0.0;
  /// Cumulative backtracking trials.
  long trials = 0;
};

enum class RunStatus { converged, max_iter, linesearch_failure, domain_error, numeric_error, config_error };

const char* status_name(RunStatus status);

struct IterateTrace {
  std::vector<TraceRecord> records;
  RunStatus status = RunStatus::max_iter;
  std::string message;
  int clamp_events = 0;
  Vector x_final;
  /// x^0, x^1, ... when keep_iterates is set.
  std::vector<Vector> iterates;

  int iterations() const { return records.empty() ? 0 : records.back().k; }
  double final_F() const { return records.empty() ? kInf : records.back().F; }
  double final_gap() const { return records.empty() ? kInf : records.back().gap; }
  long grad_evals() const { return records.empty() ? 0 : records.back().grad_evals; }
  long trials() const { return records.empty() ? 0 : records.back().trials; }
};

/// grad phi*(grad f(x)) after applying the domain-margin policy.
/// `clamp_events` (if given) is incremented by the number of clamped coordinates.
Vector preconditioned_gradient(const ReferenceFunction& phi, const Vector& grad, DomainPolicy policy, double eta,
                               double tolerance, int* clamp_events = nullptr);

/// y = x - lambda grad phi*(grad f(x)).
Vector forward_step(const SmoothObjective& f, double lambda, const Vector& x);

struct GapEvaluation {
  double F = 0.0;
  double fbe = 0.0;
  double gap = 0.0;
  ProxResult prox;  ///< backward step at y = x - lambda d
};

/// Forward-backward envelope and gap at x from a precomputed gradient
/// direction d = grad phi*(grad f(x)).
GapEvaluation evaluate_gap(const SmoothObjective& f, const Regularizer& g, double lambda, const Vector& x, double fx,
                           const Vector& d);

/// F_lambda(x).
double fbe(const SmoothObjective& f, const Regularizer& g, double lambda, const Vector& x);
/// (F(x) - F_lambda(x)) / lambda.
double gap(const SmoothObjective& f, const Regularizer& g, double lambda, const Vector& x);

/// Fixed-step anisotropic proximal gradient.
IterateTrace run_fixed(const SmoothObjective& f, const Regularizer& g, const SolverConfig& config, const Vector& x0);
/// Backtracking variant; config.mode picks plain or warm-started starts.
IterateTrace run_linesearch(const SmoothObjective& f, const Regularizer& g, const SolverConfig& config,
                            const Vector& x0);
/// Dispatches on config.mode.
IterateTrace run(const SmoothObjective& f, const Regularizer& g, const SolverConfig& config, const Vector& x0);

/// Scaled Euclidean proximal gradient with metric diag(weights), written
/// without the reference-function machinery.
IterateTrace run_euclidean_baseline(const std::function<double(const Vector&)>& value,
                                    const std::function<Vector(const Vector&)>& gradient, const Regularizer& g,
                                    const Vector& weights, std::optional<double> L, const SolverConfig& config,
                                    const Vector& x0);

using GapOracle = std::function<double(const Vector&)>;

/// Gradient descent with Armijo backtracking on a smooth total objective.
/// Stops on `gap_oracle(x) <= gap_tol (1 + |F|)`; without an oracle the
/// Euclidean gap 0.5 ||grad||^2 is used.
IterateTrace run_armijo_gd(const std::function<double(const Vector&)>& value,
                           const std::function<Vector(const Vector&)>& gradient, const SolverConfig& config,
                           const Vector& x0, const GapOracle& gap_oracle = {});

struct RateEstimate {
  bool defined = false;
  double slope = 0.0;
  double intercept = 0.0;
  /// RMS residual of the fit of ln(F - inf) against k.
  double residual = 0.0;
  int points = 0;
  std::string reason;
};

/// Least-squares fit of ln(F_k - inf_F) over the second half of the records
/// whose excess is above `floor`.
RateEstimate rate_monitor(const std::vector<double>& F, double inf_F, double floor = 1e-10);
RateEstimate rate_monitor(const std::vector<TraceRecord>& records, double inf_F, double floor = 1e-10);

}  // namespace aprox
