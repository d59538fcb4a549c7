#include "aprox/divergence.hpp"

#include <algorithm>
#include <cmath>

#include "aprox/errors.hpp"

namespace aprox {

BregmanValue bregman_dual(const ReferenceFunction& phi, const Vector& x, const Vector& y) {
  if (x.size() != phi.dim() || y.size() != phi.dim())
    throw ConfigError("bregman_dual: argument dimension does not match the reference");
  if (!phi.in_conj_interior(y)) return BregmanValue::infinity();
  const auto fx = phi.conj_value(x);
  if (fx.is_infinite()) return BregmanValue::infinity();
  // Summed coordinate-wise so that each term is formed before cancellation.
  double acc = 0.0;
  for (Index j = 0; j < x.size(); ++j) {
    const auto& c = phi.coordinate(j);
    const double term =
        c.conj_value(x[j]).value() - c.conj_value(y[j]).value() - c.conj_grad(y[j]) * (x[j] - y[j]);
    acc += term;
  }
  return BregmanValue::finite(acc);
}

BregmanValue bregman_primal(const ReferenceFunction& phi, const Vector& u, const Vector& v) {
  if (u.size() != phi.dim() || v.size() != phi.dim())
    throw ConfigError("bregman_primal: argument dimension does not match the reference");
  double acc = 0.0;
  for (Index j = 0; j < u.size(); ++j) {
    const auto& c = phi.coordinate(j);
    acc += c.value(u[j]) - c.value(v[j]) - c.grad(v[j]) * (u[j] - v[j]);
  }
  return BregmanValue::finite(acc);
}

double dual_identity_residual(const ReferenceFunction& phi, const Vector& x, const Vector& y) {
  const Vector gx = phi.conj_grad(x);
  const Vector gy = phi.conj_grad(y);
  const double lhs = bregman_dual(phi, x, y).value();
  const double rhs = bregman_primal(phi, gy, gx).value();
  return std::abs(lhs - rhs);
}

}  // namespace aprox
