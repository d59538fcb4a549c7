#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aprox/numeric.hpp"
#include "aprox/reference.hpp"

namespace aprox {

/// A convex scalar function given by oracles. `subgradient` returns the
/// interval [lo, hi] of the subdifferential at t. `curvature` is optional and
/// only used to polish bisection results where the function is smooth.
struct ScalarFunction {
  std::function<double(double)> value;
  std::function<std::pair<double, double>(double)> subgradient;
  std::function<double(double)> curvature;

  static ScalarFunction zero();
  static ScalarFunction linear(double c);
  static ScalarFunction abs(double nu);
  static ScalarFunction half_square(double nu);
};

/// The nonsmooth part g of F = f + g.
class Regularizer {
 public:
  enum class Kind { zero, linear, l1, squared_l2, consensus_lifted, separable_custom };

  static Regularizer zero(Index dim);
  /// g(x) = <c, x>.
  static Regularizer linear(Vector c);
  /// g(x) = nu ||x||_1.
  static Regularizer l1(Index dim, double nu);
  /// g(x) = nu/2 ||x||^2.
  static Regularizer squared_l2(Index dim, double nu);
  /// Indicator of {(x, x_-) : x_- = -x} on R^{2 half_dim}.
  static Regularizer consensus(Index half_dim);
  static Regularizer separable(std::vector<ScalarFunction> parts);

  Kind kind() const noexcept { return kind_; }
  Index dim() const noexcept { return dim_; }
  double nu() const noexcept { return nu_; }
  const Vector& coefficients() const noexcept { return c_; }
  std::span<const ScalarFunction> parts() const { return parts_; }

  /// +inf off the domain (only the consensus indicator has one).
  double value(const Vector& x) const;

  /// dom g* meets -int dom phi*, which makes the backward step well defined.
  bool constraint_qualification(const ReferenceFunction& phi) const;

  /// Asserted prox-boundedness threshold; +inf unless set.
  double prox_threshold() const noexcept { return lambda_g_; }
  Regularizer with_prox_threshold(double lambda_g) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::zero;
  Index dim_ = 0;
  double nu_ = 0.0;
  Vector c_;
  std::vector<ScalarFunction> parts_;
  double lambda_g_ = kInf;
};

struct ProxResult {
  Vector point;
  /// g(point) + (lambda ⋆ phi)(point - y).
  double envelope_value = 0.0;
};

/// argmin_x g(x) + (lambda ⋆ phi)(x - y).
ProxResult backward_step(const Regularizer& g, const ReferenceFunction& phi, double lambda, const Vector& y);

/// y + lambda grad phi*(0); requires 0 in int dom phi*.
Vector prox_zero(const ReferenceFunction& phi, double lambda, const Vector& y);
/// Backward step of <c, .> under the exponential reference: y + lambda ln(-c).
Vector prox_linear_exp(const Vector& c, double lambda, const Vector& y);
/// Soft thresholding at lambda (h*)'(nu); zero when nu >= 1.
Vector prox_l1_symlog(double nu, double lambda, const Vector& y);
/// Solves nu x + tanh((x - y) / (2 lambda)) = 0 per coordinate.
Vector prox_sql2_symlog(double nu, double lambda, const Vector& y);
/// Projection onto x_- = -x under Exp(x) + Exp(x_-).
std::pair<Vector, Vector> prox_consensus_exp(double lambda, const Vector& y, const Vector& y_minus);
/// Per-coordinate bracketed bisection on 0 in dg(t) + psi_j'((t - y_j) / lambda).
Vector prox_separable_generic(std::span<const ScalarFunction> g, const ReferenceFunction& phi, double lambda,
                              const Vector& y);

/// ||y - [aprox(y) + lambda grad phi*(bprox(grad phi(y / lambda)))]||_inf.
/// Only the pair (nu ||.||_1, symmetric symlog) has a dual oracle.
double moreau_decomposition_residual(const Regularizer& g, const ReferenceFunction& phi, double lambda,
                                     const Vector& y);

}  // namespace aprox
