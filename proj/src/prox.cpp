#include "aprox/prox.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aprox/errors.hpp"

namespace aprox {

ScalarFunction ScalarFunction::zero() {
  return {[](double) { return 0.0; }, [](double) { return std::pair{0.0, 0.0}; }, [](double) { return 0.0; }};
}

ScalarFunction ScalarFunction::linear(double c) {
  return {[c](double t) { return c * t; }, [c](double) { return std::pair{c, c}; }, [](double) { return 0.0; }};
}

ScalarFunction ScalarFunction::abs(double nu) {
  return {[nu](double t) { return nu * std::abs(t); },
          [nu](double t) {
            if (t > 0.0) return std::pair{nu, nu};
            if (t < 0.0) return std::pair{-nu, -nu};
            return std::pair{-nu, nu};
          },
          [](double) { return 0.0; }};
}

ScalarFunction ScalarFunction::half_square(double nu) {
  return {[nu](double t) { return 0.5 * nu * t * t; },
          [nu](double t) { return std::pair{nu * t, nu * t}; },
          [nu](double) { return nu; }};
}

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive and finite");
}

// Open interval int dom psi* of one coordinate.
std::pair<double, double> conj_interior(const CoordinateReference& c) {
  switch (c.kernel) {
    case Kernel::quadratic: return {-kInf, kInf};
    case Kernel::exp: return {c.tilt, kInf};
    case Kernel::sym_logistic: return {c.tilt - c.scale, c.tilt + c.scale};
  }
  return {0.0, 0.0};
}

bool symmetric(const CoordinateReference& c) { return c.tilt == 0.0 && c.kernel != Kernel::exp; }

// Solves 0 in dg(t) + r(t) for r continuous and strictly increasing.
// Bracket by doubling expansion around y, bisect to width 1e-14, then at
// most two Newton steps where g is differentiable.
template <class R, class DR>
double solve_inclusion(const ScalarFunction& g, R r, DR dr, double y, std::size_t index) {
  auto residual_interval = [&](double t) {
    const auto [lo, hi] = g.subgradient(t);
    const double rt = r(t);
    return std::pair{lo + rt, hi + rt};
  };
  auto too_low = [&](double t) { return residual_interval(t).second < 0.0; };
  auto too_high = [&](double t) { return residual_interval(t).first > 0.0; };

  double step = std::max(1.0, std::abs(y));
  double lo = y - step, hi = y + step;
  int expansions = 0;
  while (too_low(hi)) {
    lo = hi;
    hi += step;
    step *= 2.0;
    if (++expansions > 1100 || !std::isfinite(hi))
      throw ProxBoundednessError("backward step stationarity could not be bracketed from above", index);
  }
  while (too_high(lo)) {
    hi = lo;
    lo -= step;
    step *= 2.0;
    if (++expansions > 2200 || !std::isfinite(lo))
      throw ProxBoundednessError("backward step stationarity could not be bracketed from below", index);
  }

  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 4000 && hi - lo > 1e-14; ++it) {
    t = 0.5 * (lo + hi);
    if (t <= lo || t >= hi) break;
    if (too_low(t)) {
      lo = t;
    } else if (too_high(t)) {
      hi = t;
    } else {
      return t;  // 0 is in the residual interval: exact at a kink
    }
  }
  t = 0.5 * (lo + hi);

  if (g.curvature) {
    for (int polish = 0; polish < 2; ++polish) {
      const auto [glo, ghi] = g.subgradient(t);
      if (glo != ghi) break;
      const double res = glo + r(t);
      const double slope = g.curvature(t) + dr(t);
      if (res == 0.0 || !(slope > 0.0)) break;
      const double next = t - res / slope;
      if (!(next >= lo && next <= hi)) break;
      const auto [nlo, nhi] = g.subgradient(next);
      if (nlo != nhi || std::abs(nlo + r(next)) >= std::abs(res)) break;
      t = next;
    }
  }
  if (!std::isfinite(t)) throw NumericError("backward step inner solve diverged", index);
  return t;
}

double solve_coordinate(const ScalarFunction& g, const CoordinateReference& psi, double lambda, double y,
                        std::size_t index) {
  return solve_inclusion(
      g, [&](double t) { return psi.grad((t - y) / lambda); },
      [&](double t) { return psi.curvature((t - y) / lambda) / lambda; }, y, index);
}

double soft_threshold(double y, double rho) {
  if (!(rho < kInf)) return 0.0;
  const double m = std::abs(y) - rho;
  return m > 0.0 ? std::copysign(m, y) : 0.0;
}

// nu x + psi'((x - y) / lambda) = 0 for a symlog coordinate, by Newton
// safeguarded inside a sign-change bracket.
double sql2_symlog_coordinate(double nu, double lambda, double y, const CoordinateReference& psi,
                              std::size_t index) {
  auto G = [&](double x) { return nu * x + psi.grad((x - y) / lambda); };
  auto dG = [&](double x) { return nu + psi.curvature((x - y) / lambda) / lambda; };
  double lo = (-psi.tilt - psi.scale) / nu;
  double hi = (psi.scale - psi.tilt) / nu;
  if (psi.tilt == 0.0) {
    lo = std::max(lo, std::min(0.0, y));
    hi = std::min(hi, std::max(0.0, y));
  }
  if (lo == hi) return lo;
  if (G(lo) > 0.0 || G(hi) < 0.0) throw NumericError("squared-l2 backward step lost its bracket", index);
  double x = std::clamp(y == 0.0 ? 0.0 : 0.5 * (lo + hi), lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double gx = G(x);
    if (gx == 0.0) return x;
    if (gx < 0.0) lo = x; else hi = x;
    double next = x - gx / dG(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-300) return next;
    x = next;
  }
  return x;
}

}  // namespace

Regularizer Regularizer::zero(Index dim) {
  if (dim < 1) throw ConfigError("regularizer needs dim >= 1");
  Regularizer g;
  g.kind_ = Kind::zero;
  g.dim_ = dim;
  return g;
}

Regularizer Regularizer::linear(Vector c) {
  if (c.size() < 1) throw ConfigError("regularizer needs dim >= 1");
  if (!c.allFinite()) throw ConfigError("linear regularizer coefficients must be finite");
  Regularizer g;
  g.kind_ = Kind::linear;
  g.dim_ = c.size();
  g.c_ = std::move(c);
  return g;
}

Regularizer Regularizer::l1(Index dim, double nu) {
  if (dim < 1) throw ConfigError("regularizer needs dim >= 1");
  require_positive(nu, "nu");
  Regularizer g;
  g.kind_ = Kind::l1;
  g.dim_ = dim;
  g.nu_ = nu;
  return g;
}

Regularizer Regularizer::squared_l2(Index dim, double nu) {
  if (dim < 1) throw ConfigError("regularizer needs dim >= 1");
  require_positive(nu, "nu");
  Regularizer g;
  g.kind_ = Kind::squared_l2;
  g.dim_ = dim;
  g.nu_ = nu;
  return g;
}

Regularizer Regularizer::consensus(Index half_dim) {
  if (half_dim < 1) throw ConfigError("regularizer needs dim >= 1");
  Regularizer g;
  g.kind_ = Kind::consensus_lifted;
  g.dim_ = 2 * half_dim;
  return g;
}

Regularizer Regularizer::separable(std::vector<ScalarFunction> parts) {
  if (parts.empty()) throw ConfigError("regularizer needs dim >= 1");
  for (const auto& p : parts)
    if (!p.value || !p.subgradient) throw ConfigError("separable regularizer needs value and subgradient oracles");
  Regularizer g;
  g.kind_ = Kind::separable_custom;
  g.dim_ = static_cast<Index>(parts.size());
  g.parts_ = std::move(parts);
  return g;
}

Regularizer Regularizer::with_prox_threshold(double lambda_g) const {
  if (!(lambda_g > 0.0)) throw ConfigError("prox threshold must be positive");
  Regularizer g = *this;
  g.lambda_g_ = lambda_g;
  return g;
}

double Regularizer::value(const Vector& x) const {
  if (x.size() != dim_) throw ConfigError("regularizer: dimension mismatch");
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::linear: return c_.dot(x);
    case Kind::l1: return nu_ * x.lpNorm<1>();
    case Kind::squared_l2: return 0.5 * nu_ * x.squaredNorm();
    case Kind::consensus_lifted: {
      const Index n = dim_ / 2;
      for (Index j = 0; j < n; ++j)
        if (x[n + j] != -x[j]) return kInf;
      return 0.0;
    }
    case Kind::separable_custom: {
      double acc = 0.0;
      for (Index j = 0; j < dim_; ++j) acc += parts_[static_cast<std::size_t>(j)].value(x[j]);
      return acc;
    }
  }
  return 0.0;
}

bool Regularizer::constraint_qualification(const ReferenceFunction& phi) const {
  if (phi.dim() != dim_) return false;
  switch (kind_) {
    case Kind::zero:
      for (const auto& c : phi.coordinates()) {
        const auto [lo, hi] = conj_interior(c);
        if (!(lo < 0.0 && 0.0 < hi)) return false;
      }
      return true;
    case Kind::linear:
      for (Index j = 0; j < dim_; ++j) {
        const auto [lo, hi] = conj_interior(phi.coordinate(j));
        if (!(lo < -c_[j] && -c_[j] < hi)) return false;
      }
      return true;
    case Kind::l1:
      for (const auto& c : phi.coordinates()) {
        const auto [lo, hi] = conj_interior(c);
        if (!(hi > -nu_ && lo < nu_)) return false;
      }
      return true;
    case Kind::squared_l2: return true;
    case Kind::consensus_lifted: {
      const Index n = dim_ / 2;
      for (Index j = 0; j < n; ++j) {
        const auto [lo1, hi1] = conj_interior(phi.coordinate(j));
        const auto [lo2, hi2] = conj_interior(phi.coordinate(n + j));
        if (!(std::max(lo1, lo2) < std::min(hi1, hi2))) return false;
      }
      return true;
    }
    case Kind::separable_custom: return true;
  }
  return false;
}

std::string Regularizer::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::zero: os << "zero"; break;
    case Kind::linear: os << "linear"; break;
    case Kind::l1: os << "l1(nu=" << nu_ << ")"; break;
    case Kind::squared_l2: os << "sql2(nu=" << nu_ << ")"; break;
    case Kind::consensus_lifted: os << "consensus"; break;
    case Kind::separable_custom: os << "separable"; break;
  }
  os << "[" << dim_ << "]";
  return os.str();
}

ProxResult backward_step(const Regularizer& g, const ReferenceFunction& phi, double lambda, const Vector& y) {
  require_positive(lambda, "lambda");
  if (g.dim() != phi.dim() || y.size() != phi.dim())
    throw ConfigError("backward step: dimension mismatch between g, phi and y");
  if (!(lambda < g.prox_threshold()))
    throw ConfigError("backward step: lambda must stay below the asserted prox-boundedness threshold");
  if (!g.constraint_qualification(phi))
    throw ConfigError("backward step: constraint qualification fails for " + g.describe() + " under " +
                      phi.describe());

  const Index n = y.size();
  Vector x(n);
  switch (g.kind()) {
    case Regularizer::Kind::zero: x = y + lambda * phi.conj_grad(Vector::Zero(n)); break;
    case Regularizer::Kind::linear: x = y + lambda * phi.conj_grad(-g.coefficients()); break;
    case Regularizer::Kind::l1: {
      const double nu = g.nu();
      for (Index j = 0; j < n; ++j) {
        const auto& psi = phi.coordinate(j);
        if (symmetric(psi)) {
          const double rho = psi.conj_boundary_distance(nu) > 0.0 ? lambda * psi.conj_grad(nu) : kInf;
          x[j] = soft_threshold(y[j], rho);
        } else {
          x[j] = solve_coordinate(ScalarFunction::abs(nu), psi, lambda, y[j], static_cast<std::size_t>(j));
        }
      }
      break;
    }
    case Regularizer::Kind::squared_l2: {
      const double nu = g.nu();
      for (Index j = 0; j < n; ++j) {
        const auto& psi = phi.coordinate(j);
        if (psi.kernel == Kernel::quadratic && psi.tilt == 0.0) {
          const double k = (psi.scale * psi.weight) / (psi.epi * lambda);
          x[j] = (k * y[j]) / (k + nu);
        } else if (psi.kernel == Kernel::sym_logistic) {
          x[j] = sql2_symlog_coordinate(nu, lambda, y[j], psi, static_cast<std::size_t>(j));
        } else {
          x[j] = solve_coordinate(ScalarFunction::half_square(nu), psi, lambda, y[j], static_cast<std::size_t>(j));
        }
      }
      break;
    }
    case Regularizer::Kind::consensus_lifted: {
      const Index h = n / 2;
      for (Index j = 0; j < h; ++j) {
        const auto& p = phi.coordinate(j);
        const auto& q = phi.coordinate(h + j);
        double t;
        if (p == q) {
          t = (y[j] - y[h + j]) / 2.0;
        } else {
          const double yp = y[j], yq = y[h + j];
          t = solve_inclusion(
              ScalarFunction::zero(),
              [&](double s) { return p.grad((s - yp) / lambda) - q.grad((-s - yq) / lambda); },
              [&](double s) { return (p.curvature((s - yp) / lambda) + q.curvature((-s - yq) / lambda)) / lambda; },
              0.5 * (yp - yq), static_cast<std::size_t>(j));
        }
        x[j] = t;
        x[h + j] = -t;
      }
      break;
    }
    case Regularizer::Kind::separable_custom: x = prox_separable_generic(g.parts(), phi, lambda, y); break;
  }

  ProxResult out;
  out.envelope_value = g.value(x) + EpiScaledReference(phi, lambda).value(x - y);
  out.point = std::move(x);
  return out;
}

Vector prox_zero(const ReferenceFunction& phi, double lambda, const Vector& y) {
  return backward_step(Regularizer::zero(phi.dim()), phi, lambda, y).point;
}

Vector prox_linear_exp(const Vector& c, double lambda, const Vector& y) {
  require_positive(lambda, "lambda");
  if (c.size() != y.size()) throw ConfigError("prox_linear_exp: dimension mismatch");
  Vector x(y.size());
  for (Index j = 0; j < y.size(); ++j) {
    if (!(c[j] < 0.0))
      throw ConfigError("constraint qualification fails: -c must lie in the open positive orthant (coordinate " +
                        std::to_string(j) + ")");
    x[j] = y[j] + lambda * std::log(-c[j]);
  }
  return x;
}

Vector prox_l1_symlog(double nu, double lambda, const Vector& y) {
  require_positive(nu, "nu");
  require_positive(lambda, "lambda");
  const double rho = nu < 1.0 ? lambda * (2.0 * std::atanh(nu)) : kInf;
  Vector x(y.size());
  for (Index j = 0; j < y.size(); ++j) x[j] = soft_threshold(y[j], rho);
  return x;
}

Vector prox_sql2_symlog(double nu, double lambda, const Vector& y) {
  require_positive(nu, "nu");
  require_positive(lambda, "lambda");
  const CoordinateReference h{Kernel::sym_logistic, 1.0, 1.0, 1.0, 0.0};
  Vector x(y.size());
  for (Index j = 0; j < y.size(); ++j) x[j] = sql2_symlog_coordinate(nu, lambda, y[j], h, static_cast<std::size_t>(j));
  return x;
}

std::pair<Vector, Vector> prox_consensus_exp(double lambda, const Vector& y, const Vector& y_minus) {
  require_positive(lambda, "lambda");
  if (y.size() != y_minus.size()) throw ConfigError("prox_consensus_exp: the two halves differ in length");
  Vector x = (y - y_minus) / 2.0;
  Vector xm = -x;
  return {std::move(x), std::move(xm)};
}

Vector prox_separable_generic(std::span<const ScalarFunction> g, const ReferenceFunction& phi, double lambda,
                              const Vector& y) {
  require_positive(lambda, "lambda");
  if (static_cast<Index>(g.size()) != phi.dim() || y.size() != phi.dim())
    throw ConfigError("prox_separable_generic: dimension mismatch");
  Vector x(y.size());
  for (Index j = 0; j < y.size(); ++j)
    x[j] = solve_coordinate(g[static_cast<std::size_t>(j)], phi.coordinate(j), lambda, y[j],
                            static_cast<std::size_t>(j));
  return x;
}

double moreau_decomposition_residual(const Regularizer& g, const ReferenceFunction& phi, double lambda,
                                     const Vector& y) {
  bool supported = g.kind() == Regularizer::Kind::l1;
  for (const auto& c : phi.coordinates()) supported = supported && c.kernel == Kernel::sym_logistic && c.tilt == 0.0;
  if (!supported)
    throw ConfigError("moreau decomposition: no dual proximal oracle for " + g.describe() + " under " +
                      phi.describe());

  const Vector primal = backward_step(g, phi, lambda, y).point;
  const double nu = g.nu();
  double worst = 0.0;
  for (Index j = 0; j < y.size(); ++j) {
    const auto& psi = phi.coordinate(j);
    // bprox of the indicator of [-nu, nu] is the projection onto it
    const double s = std::clamp(psi.grad(y[j] / lambda), -nu, nu);
    const double dual = lambda * psi.conj_grad(s);
    worst = std::max(worst, std::abs(y[j] - (primal[j] + dual)));
  }
  return worst;
}

}  // namespace aprox
