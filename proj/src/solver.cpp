#include "aprox/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "aprox/errors.hpp"

namespace aprox {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool stop_on_gap(const SolverConfig& cfg, double gap_value, double F) {
  return cfg.gap_tol > 0.0 && gap_value <= cfg.gap_tol * (1.0 + std::abs(F));
}

// Runs `body` and converts library errors into a terminal status on `trace`.
template <class Body>
void guarded(IterateTrace& trace, Body body) {
  try {
    body();
  } catch (const LinesearchFailure& e) {
    trace.status = RunStatus::linesearch_failure;
    trace.message = e.what();
  } catch (const DomainError& e) {
    trace.status = RunStatus::domain_error;
    trace.message = e.what();
  } catch (const NumericError& e) {
    trace.status = RunStatus::numeric_error;
    trace.message = e.what();
  } catch (const ConfigError& e) {
    trace.status = RunStatus::config_error;
    trace.message = e.what();
  }
}

void require_start(const SmoothObjective& f, const Regularizer& g, const Vector& x0) {
  if (!f.value || !f.gradient) throw ConfigError("smooth objective needs value and gradient oracles");
  if (x0.size() != f.dim() || g.dim() != f.dim())
    throw ConfigError("dimension mismatch between x0, f and g");
  if (!std::isfinite(g.value(x0))) throw ConfigError("x0 lies outside dom g");
  if (!g.constraint_qualification(f.reference))
    throw ConfigError("constraint qualification fails for " + g.describe() + " under " + f.reference.describe());
}

double default_gap_lambda(const SolverConfig& cfg, std::optional<double> L) {
  if (cfg.gap_lambda > 0.0) return cfg.gap_lambda;
  switch (cfg.mode) {
    case SolverConfig::Mode::fixed: return cfg.fixed_step(L);
    case SolverConfig::Mode::linesearch: return cfg.lambda_max;
    case SolverConfig::Mode::linesearch_warmstart: return cfg.lambda_init;
  }
  return cfg.lambda;
}

}  // namespace

double SolverConfig::fixed_step(std::optional<double> L) const {
  if (lambda > 0.0) return lambda;
  if (L && *L > 0.0) return 1.0 / *L;
  throw ConfigError("fixed mode needs lambda or a declared smoothness constant");
}

void SolverConfig::validate(std::optional<double> L) const {
  if (max_iter < 0) throw ConfigError("max_iter must be nonnegative");
  if (!(gap_tol >= 0.0)) throw ConfigError("gap_tol must be nonnegative");
  if (!(clamp_eta > 0.0) || !(clamp_tolerance >= 0.0)) throw ConfigError("clamp parameters must be positive");
  switch (mode) {
    case Mode::fixed: {
      const double lam = fixed_step(L);
      if (!(lam > 0.0) || !std::isfinite(lam)) throw ConfigError("lambda must be positive");
      if (L && lam * *L > 1.0 + 1e-12) throw ConfigError("fixed step lambda exceeds 1/L");
      break;
    }
    case Mode::linesearch:
      if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) throw ConfigError("lambda_max must be positive");
      if (!(lambda_min > 0.0) || lambda_min > lambda_max) throw ConfigError("need 0 < lambda_min <= lambda_max");
      [[fallthrough]];
    case Mode::linesearch_warmstart:
      if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
      if (mode == Mode::linesearch_warmstart) {
        if (!(lambda_init > 0.0) || !std::isfinite(lambda_init)) throw ConfigError("lambda_init must be positive");
        if (!(lambda_min > 0.0) || lambda_min > lambda_init) throw ConfigError("need 0 < lambda_min <= lambda_init");
        if (lambda_max != 0.0 && lambda_max < lambda_init) throw ConfigError("lambda_max must be >= lambda_init");
      }
      break;
  }
}

const char* mode_name(SolverConfig::Mode mode) {
  switch (mode) {
    case SolverConfig::Mode::fixed: return "fixed";
    case SolverConfig::Mode::linesearch: return "linesearch";
    case SolverConfig::Mode::linesearch_warmstart: return "warmstart";
  }
  return "?";
}

SolverConfig::Mode parse_mode(const std::string& name) {
  if (name == "fixed") return SolverConfig::Mode::fixed;
  if (name == "linesearch") return SolverConfig::Mode::linesearch;
  if (name == "warmstart" || name == "linesearch_warmstart") return SolverConfig::Mode::linesearch_warmstart;
  throw ConfigError("unknown solver mode '" + name + "' (expected fixed, linesearch or warmstart)");
}

const char* status_name(RunStatus status) {
  switch (status) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_iter: return "max_iter";
    case RunStatus::linesearch_failure: return "linesearch_failure";
    case RunStatus::domain_error: return "domain_error";
    case RunStatus::numeric_error: return "numeric_error";
    case RunStatus::config_error: return "config_error";
  }
  return "?";
}

Vector preconditioned_gradient(const ReferenceFunction& phi, const Vector& grad, DomainPolicy policy, double eta,
                               double tolerance, int* clamp_events) {
  if (phi.in_conj_interior(grad)) return phi.conj_grad(grad);
  if (policy == DomainPolicy::clamp) {
    auto [adjusted, moved] = phi.clamp_into_interior(grad, eta, tolerance);
    if (clamp_events) *clamp_events += moved;
    if (phi.in_conj_interior(adjusted)) return phi.conj_grad(adjusted);
  }
  for (Index j = 0; j < grad.size(); ++j) {
    const double d = phi.coordinate(j).conj_boundary_distance(grad[j]);
    if (!(d > phi.domain_margin())) {
      std::ostringstream os;
      os << "range condition violated: grad f(x) is not interior to dom phi* (boundary distance " << d << ")";
      throw DomainError(os.str(), static_cast<std::size_t>(j));
    }
  }
  return phi.conj_grad(grad);
}

Vector forward_step(const SmoothObjective& f, double lambda, const Vector& x) {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  const Vector d = preconditioned_gradient(f.reference, f.gradient(x), DomainPolicy::strict, 0.0, 0.0);
  return x - lambda * d;
}

GapEvaluation evaluate_gap(const SmoothObjective& f, const Regularizer& g, double lambda, const Vector& x, double fx,
                           const Vector& d) {
  GapEvaluation out;
  const double gx = g.value(x);
  out.prox = backward_step(g, f.reference, lambda, x - lambda * d);
  const double tail = lambda * f.reference.value(d);  // (lambda ⋆ phi)(lambda d)
  out.F = fx + gx;
  out.fbe = fx + out.prox.envelope_value - tail;
  // Without the common f(x), so the difference does not cancel it.
  out.gap = (gx - out.prox.envelope_value + tail) / lambda;
  return out;
}

double fbe(const SmoothObjective& f, const Regularizer& g, double lambda, const Vector& x) {
  const Vector d = preconditioned_gradient(f.reference, f.gradient(x), DomainPolicy::strict, 0.0, 0.0);
  return evaluate_gap(f, g, lambda, x, f.value(x), d).fbe;
}

double gap(const SmoothObjective& f, const Regularizer& g, double lambda, const Vector& x) {
  const Vector d = preconditioned_gradient(f.reference, f.gradient(x), DomainPolicy::strict, 0.0, 0.0);
  return evaluate_gap(f, g, lambda, x, f.value(x), d).gap;
}

IterateTrace run_fixed(const SmoothObjective& f, const Regularizer& g, const SolverConfig& config, const Vector& x0) {
  SolverConfig cfg = config;
  cfg.mode = SolverConfig::Mode::fixed;
  cfg.validate(f.L);
  require_start(f, g, x0);
  if (!(cfg.fixed_step(f.L) < g.prox_threshold()))
    throw ConfigError("lambda must stay below the asserted prox-boundedness threshold");
  const double lambda = cfg.fixed_step(f.L);
  const double gap_lambda = default_gap_lambda(cfg, f.L);

  IterateTrace trace;
  Vector x = x0;
  const auto t0 = Clock::now();
  guarded(trace, [&] {
    long evals = 0;
    for (int k = 0;; ++k) {
      if (cfg.keep_iterates) trace.iterates.push_back(x);
      const Vector grad = f.gradient(x);
      ++evals;
      const Vector d = preconditioned_gradient(f.reference, grad, cfg.domain_policy, cfg.clamp_eta,
                                               cfg.clamp_tolerance, &trace.clamp_events);
      const double fx = f.value(x);
      const GapEvaluation step = evaluate_gap(f, g, lambda, x, fx, d);
      const double gap_value =
          gap_lambda == lambda ? step.gap : evaluate_gap(f, g, gap_lambda, x, fx, d).gap;
      trace.records.push_back({k, step.F, gap_value, lambda, evals, seconds_since(t0), 0});
      if (stop_on_gap(cfg, gap_value, step.F)) {
        trace.status = RunStatus::converged;
        break;
      }
      if (k >= cfg.max_iter) {
        trace.status = RunStatus::max_iter;
        break;
      }
      x = step.prox.point;
    }
    trace.records.back().lambda = 0.0;
  });
  trace.x_final = x;
  return trace;
}

IterateTrace run_linesearch(const SmoothObjective& f, const Regularizer& g, const SolverConfig& config,
                            const Vector& x0) {
  if (config.mode == SolverConfig::Mode::fixed) throw ConfigError("run_linesearch needs a linesearch mode");
  config.validate(f.L);
  require_start(f, g, x0);
  const bool warm = config.mode == SolverConfig::Mode::linesearch_warmstart;
  const double cap = warm ? (config.lambda_max > 0.0 ? config.lambda_max : kInf) : config.lambda_max;
  if (!(std::min(cap, warm ? config.lambda_init : cap) < g.prox_threshold()))
    throw ConfigError("linesearch start must stay below the asserted prox-boundedness threshold");
  const double gap_lambda = default_gap_lambda(config, f.L);
  const ReferenceFunction& phi = f.reference;

  IterateTrace trace;
  Vector x = x0;
  const auto t0 = Clock::now();
  guarded(trace, [&] {
    long evals = 0, trials = 0;
    double previous = 0.0;
    for (int k = 0;; ++k) {
      if (config.keep_iterates) trace.iterates.push_back(x);
      const Vector grad = f.gradient(x);
      ++evals;
      const Vector d = preconditioned_gradient(phi, grad, config.domain_policy, config.clamp_eta,
                                               config.clamp_tolerance, &trace.clamp_events);
      const double fx = f.value(x);
      const GapEvaluation at_ref = evaluate_gap(f, g, gap_lambda, x, fx, d);
      trace.records.push_back({k, at_ref.F, at_ref.gap, 0.0, evals, seconds_since(t0), trials});
      if (stop_on_gap(config, at_ref.gap, at_ref.F)) {
        trace.status = RunStatus::converged;
        break;
      }
      if (k >= config.max_iter) {
        trace.status = RunStatus::max_iter;
        break;
      }

      const double start = warm ? (k == 0 ? config.lambda_init : std::min(previous / config.alpha, cap))
                                : config.lambda_max;
      const double phi_d = phi.value(d);
      const double slack = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fx));
      double lambda = start;
      Vector next;
      for (;;) {
        lambda = std::max(lambda, config.lambda_min);
        ++trials;
        const Vector y = x - lambda * d;
        ProxResult r = backward_step(g, phi, lambda, y);
        const double bound = EpiScaledReference(phi, lambda).value(r.point - y) - lambda * phi_d + fx;
        const double fnext = f.value(r.point);
        if (fnext <= bound + slack) {
          next = std::move(r.point);
          break;
        }
        if (lambda <= config.lambda_min) {
          std::ostringstream os;
          os << "linesearch reached lambda_min = " << config.lambda_min << " at iteration " << k
             << " without satisfying the descent test (is L or the reference wrong?)";
          throw LinesearchFailure(os.str());
        }
        lambda *= config.alpha;
      }
      trace.records.back().lambda = lambda;
      trace.records.back().trials = trials;
      previous = lambda;
      x = std::move(next);
    }
    trace.records.back().lambda = 0.0;
  });
  trace.x_final = x;
  return trace;
}

IterateTrace run(const SmoothObjective& f, const Regularizer& g, const SolverConfig& config, const Vector& x0) {
  return config.mode == SolverConfig::Mode::fixed ? run_fixed(f, g, config, x0) : run_linesearch(f, g, config, x0);
}

namespace {

// Backward step of g under (1/(2 lambda)) ||. - y||^2_M.
Vector euclidean_prox(const Regularizer& g, const Vector& w, double lambda, const Vector& y) {
  const Index n = y.size();
  Vector x(n);
  switch (g.kind()) {
    case Regularizer::Kind::zero: return y;
    case Regularizer::Kind::linear: return y - lambda * g.coefficients().cwiseQuotient(w);
    case Regularizer::Kind::l1:
      for (Index j = 0; j < n; ++j) {
        const double rho = lambda * (g.nu() / w[j]);
        const double m = std::abs(y[j]) - rho;
        x[j] = m > 0.0 ? std::copysign(m, y[j]) : 0.0;
      }
      return x;
    case Regularizer::Kind::squared_l2:
      for (Index j = 0; j < n; ++j) {
        const double k = w[j] / lambda;
        x[j] = (k * y[j]) / (k + g.nu());
      }
      return x;
    case Regularizer::Kind::consensus_lifted: {
      const Index h = n / 2;
      for (Index j = 0; j < h; ++j) {
        // weighted projection onto x_- = -x
        const double t = (w[j] * y[j] - w[h + j] * y[h + j]) / (w[j] + w[h + j]);
        x[j] = t;
        x[h + j] = -t;
      }
      return x;
    }
    case Regularizer::Kind::separable_custom:
      return prox_separable_generic(g.parts(), ReferenceFunction::euclidean(w), lambda, y);
  }
  return y;
}

}  // namespace

IterateTrace run_euclidean_baseline(const std::function<double(const Vector&)>& value,
                                    const std::function<Vector(const Vector&)>& gradient, const Regularizer& g,
                                    const Vector& weights, std::optional<double> L, const SolverConfig& config,
                                    const Vector& x0) {
  if (config.mode == SolverConfig::Mode::fixed && config.lambda <= 0.0 && !L)
    throw ConfigError("Euclidean baseline needs a Lipschitz constant or a linesearch mode");
  config.validate(L);
  if (weights.size() != x0.size() || g.dim() != x0.size()) throw ConfigError("dimension mismatch");
  if ((weights.array() <= 0.0).any()) throw ConfigError("metric weights must be positive");
  if (!std::isfinite(g.value(x0))) throw ConfigError("x0 lies outside dom g");

  const bool fixed = config.mode == SolverConfig::Mode::fixed;
  const bool warm = config.mode == SolverConfig::Mode::linesearch_warmstart;
  const double cap = warm ? (config.lambda_max > 0.0 ? config.lambda_max : kInf) : config.lambda_max;
  const double fixed_lambda = fixed ? config.fixed_step(L) : 0.0;
  const double gap_lambda = default_gap_lambda(config, L);

  // Euclidean gap: (g(x) - env + lambda/2 ||d||_M^2) / lambda with d = M^{-1} grad.
  auto gap_at = [&](const Vector& x, const Vector& d, double lam, Vector* point) {
    const Vector y = x - lam * d;
    Vector p = euclidean_prox(g, weights, lam, y);
    const Vector u = p - y;
    const double env = g.value(p) + 0.5 * u.cwiseProduct(weights).dot(u) / lam;
    const double tail = 0.5 * lam * d.cwiseProduct(weights).dot(d);
    if (point) *point = std::move(p);
    return (g.value(x) - env + tail) / lam;
  };

  IterateTrace trace;
  Vector x = x0;
  const auto t0 = Clock::now();
  guarded(trace, [&] {
    long evals = 0, trials = 0;
    double previous = 0.0;
    for (int k = 0;; ++k) {
      if (config.keep_iterates) trace.iterates.push_back(x);
      const Vector grad = gradient(x);
      ++evals;
      const Vector d = grad.cwiseQuotient(weights);
      const double fx = value(x);
      const double F = fx + g.value(x);
      Vector step_point;
      double gap_value;
      if (fixed && gap_lambda == fixed_lambda) {
        gap_value = gap_at(x, d, fixed_lambda, &step_point);
      } else {
        gap_value = gap_at(x, d, gap_lambda, nullptr);
      }
      trace.records.push_back({k, F, gap_value, 0.0, evals, seconds_since(t0), trials});
      if (stop_on_gap(config, gap_value, F)) {
        trace.status = RunStatus::converged;
        break;
      }
      if (k >= config.max_iter) {
        trace.status = RunStatus::max_iter;
        break;
      }
      double lambda = fixed_lambda;
      if (fixed) {
        if (step_point.size() == 0) step_point = euclidean_prox(g, weights, lambda, x - lambda * d);
      } else {
        lambda = warm ? (k == 0 ? config.lambda_init : std::min(previous / config.alpha, cap)) : config.lambda_max;
        const double slack = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fx));
        for (;;) {
          lambda = std::max(lambda, config.lambda_min);
          ++trials;
          Vector p = euclidean_prox(g, weights, lambda, x - lambda * d);
          const Vector s = p - x;
          const double bound = fx + grad.dot(s) + 0.5 * s.cwiseProduct(weights).dot(s) / lambda;
          if (value(p) <= bound + slack) {
            step_point = std::move(p);
            break;
          }
          if (lambda <= config.lambda_min)
            throw LinesearchFailure("Euclidean linesearch reached lambda_min at iteration " + std::to_string(k));
          lambda *= config.alpha;
        }
        trace.records.back().trials = trials;
      }
      trace.records.back().lambda = lambda;
      previous = lambda;
      x = std::move(step_point);
    }
    trace.records.back().lambda = 0.0;
  });
  trace.x_final = x;
  return trace;
}

IterateTrace run_armijo_gd(const std::function<double(const Vector&)>& value,
                           const std::function<Vector(const Vector&)>& gradient, const SolverConfig& config,
                           const Vector& x0, const GapOracle& gap_oracle) {
  if (!(config.lambda_init > 0.0) || !std::isfinite(config.lambda_init))
    throw ConfigError("Armijo descent needs lambda_init > 0");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!(config.tau > 0.0 && config.tau < 1.0)) throw ConfigError("tau must lie in (0, 1)");
  if (config.max_iter < 0) throw ConfigError("max_iter must be nonnegative");

  IterateTrace trace;
  Vector x = x0;
  const auto t0 = Clock::now();
  guarded(trace, [&] {
    long evals = 0, trials = 0;
    for (int k = 0;; ++k) {
      if (config.keep_iterates) trace.iterates.push_back(x);
      const Vector grad = gradient(x);
      ++evals;
      const double fx = value(x);
      const double sq = grad.squaredNorm();
      const double gap_value = gap_oracle ? gap_oracle(x) : 0.5 * sq;
      trace.records.push_back({k, fx, gap_value, 0.0, evals, seconds_since(t0), trials});
      if (sq == 0.0 || stop_on_gap(config, gap_value, fx)) {
        trace.status = RunStatus::converged;
        break;
      }
      if (k >= config.max_iter) {
        trace.status = RunStatus::max_iter;
        break;
      }
      double lambda = config.lambda_init;
      Vector next;
      for (;;) {
        ++trials;
        next = x - lambda * grad;
        const double fn = value(next);
        if (fn <= fx - config.tau * lambda * sq) break;
        lambda *= config.alpha;
        if (lambda < std::max(config.lambda_min, std::numeric_limits<double>::min()))
          throw LinesearchFailure("Armijo step underflow at iteration " + std::to_string(k));
      }
      trace.records.back().lambda = lambda;
      trace.records.back().trials = trials;
      x = std::move(next);
    }
    trace.records.back().lambda = 0.0;
  });
  trace.x_final = x;
  return trace;
}

RateEstimate rate_monitor(const std::vector<double>& F, double inf_F, double floor) {
  RateEstimate est;
  if (F.size() < 10) {
    est.reason = "fewer than 10 trace entries";
    return est;
  }
  if (*std::max_element(F.begin(), F.end()) == *std::min_element(F.begin(), F.end())) {
    est.reason = "flat trace";
    return est;
  }
  std::size_t usable = 0;
  while (usable < F.size() && F[usable] - inf_F > floor) ++usable;
  if (usable == 0 && F[0] - inf_F <= 0.0) {
    est.reason = "nonpositive excess over the infimum estimate";
    return est;
  }
  const std::size_t first = usable / 2;
  const std::size_t count = usable - first;
  if (count < 5) {
    est.reason = "tail too short above the floor";
    return est;
  }
  double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
  for (std::size_t i = first; i < usable; ++i) {
    const double k = static_cast<double>(i);
    const double y = std::log(F[i] - inf_F);
    sk += k;
    sy += y;
    skk += k * k;
    sky += k * y;
  }
  const double n = static_cast<double>(count);
  const double denom = n * skk - sk * sk;
  est.slope = (n * sky - sk * sy) / denom;
  est.intercept = (sy - est.slope * sk) / n;
  double rss = 0.0;
  for (std::size_t i = first; i < usable; ++i) {
    const double r = std::log(F[i] - inf_F) - (est.intercept + est.slope * static_cast<double>(i));
    rss += r * r;
  }
  est.residual = std::sqrt(rss / n);
  est.points = static_cast<int>(count);
  est.defined = std::isfinite(est.slope);
  if (!est.defined) est.reason = "degenerate fit";
  return est;
}

RateEstimate rate_monitor(const std::vector<TraceRecord>& records, double inf_F, double floor) {
  std::vector<double> F;
  F.reserve(records.size());
  for (const auto& r : records) F.push_back(r.F);
  return rate_monitor(F, inf_F, floor);
}

}  // namespace aprox
