#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aprox/numeric.hpp"

namespace aprox {

/// Scalar Legendre kernels b with full domain.
enum class Kernel {
  quadratic,     ///< b(t) = w t^2 / 2
  exp,           ///< b(t) = e^t, conjugate is the entropy s ln s - s on s >= 0
  sym_logistic,  ///< b(t) = 2 ln(1 + e^t) - t, conjugate domain [-1, 1]
};

enum class ReferenceFamily { euclidean, exp, sym_logistic, mixed };

/// One coordinate of a separable reference, kept in the closed form
///   psi(t) = alpha * (epi ⋆ b)(t) + tilt * t,   (epi ⋆ b)(t) = epi * b(t / epi).
/// Epi-scaling, pointwise scaling and tilting all map this form onto itself.
struct CoordinateReference {
  Kernel kernel = Kernel::quadratic;
  double weight = 1.0;
  double epi = 1.0;
  double scale = 1.0;
  double tilt = 0.0;

  double value(double t) const;
  double grad(double t) const;
  double curvature(double t) const;
  /// psi*(s); +inf outside the conjugate domain.
  ExtendedReal conj_value(double s) const;
  /// (psi*)'(s). Caller guarantees s is interior.
  double conj_grad(double s) const;
  /// (psi*)''(s). Caller guarantees s is interior.
  double conj_curvature(double s) const;
  bool in_conj_domain(double s) const;
  /// Signed distance from s to the boundary of dom psi*, positive inside.
  /// +inf when dom psi* is the whole line.
  double conj_boundary_distance(double s) const;

  friend bool operator==(const CoordinateReference&, const CoordinateReference&) = default;
};

/// A separable Legendre reference function phi : R^n -> R with full domain.
///
/// Objects are immutable and cheap to copy (the coordinate table is shared),
/// so one instance may be evaluated from several threads at once.
class ReferenceFunction {
 public:
  ReferenceFunction() = default;

  static ReferenceFunction euclidean(const Vector& weights);
  static ReferenceFunction exp(Index dim);
  static ReferenceFunction sym_logistic(Index dim);
  /// Build from a CLI key: "euclidean" (unit weights), "exp" or "symlog".
  static ReferenceFunction from_key(const std::string& key, Index dim);

  Index dim() const noexcept { return coords_ ? static_cast<Index>(coords_->size()) : 0; }

  double value(const Vector& x) const;
  Vector grad(const Vector& x) const;
  ExtendedReal conj_value(const Vector& y) const;
  /// Throws DomainError naming the first coordinate outside the open interior
  /// of dom phi* (shrunk by the domain margin).
  Vector conj_grad(const Vector& y) const;
  /// Diagonal of the Hessian of phi* at an interior point.
  Vector conj_curvature(const Vector& y) const;

  bool in_conj_domain(const Vector& y) const;
  bool in_conj_interior(const Vector& y) const;
  /// Smallest per-coordinate distance to the boundary of dom phi*; negative
  /// when outside, +inf when dom phi* = R^n.
  double conj_boundary_distance(const Vector& y) const;

  /// Moves coordinates that sit outside the interior by at most `tolerance`
  /// to `eta` inside the boundary. Returns the adjusted point and the number
  /// of coordinates moved; coordinates further out are left untouched.
  std::pair<Vector, int> clamp_into_interior(const Vector& y, double eta, double tolerance) const;

  /// lambda ⋆ phi expressed again in closed form.
  ReferenceFunction epi_scaled(double lambda) const;
  ReferenceFunction with_domain_margin(double margin) const;
  double domain_margin() const noexcept { return margin_; }

  ReferenceFamily family() const;
  /// True when no coordinate carries a pointwise scale or a tilt.
  bool untilted() const;
  const CoordinateReference& coordinate(Index j) const { return (*coords_)[static_cast<std::size_t>(j)]; }
  std::span<const CoordinateReference> coordinates() const { return *coords_; }
  std::string describe() const;

  static ReferenceFunction from_coordinates(std::vector<CoordinateReference> coords);

 private:
  std::shared_ptr<const std::vector<CoordinateReference>> coords_;
  double margin_ = 0.0;

  void require_dim(const Vector& v, const char* what) const;
};

/// lambda ⋆ phi evaluated directly through the base reference:
/// value(x) = lambda phi(x / lambda), grad(x) = grad phi(x / lambda),
/// conj_value(y) = lambda phi*(y), conj_grad(y) = lambda grad phi*(y).
class EpiScaledReference {
 public:
  EpiScaledReference(ReferenceFunction base, double lambda);

  double lambda() const noexcept { return lambda_; }
  const ReferenceFunction& base() const noexcept { return base_; }

  double value(const Vector& x) const { return lambda_ * base_.value(x / lambda_); }
  Vector grad(const Vector& x) const { return base_.grad(x / lambda_); }
  ExtendedReal conj_value(const Vector& y) const {
    const auto v = base_.conj_value(y);
    return v.is_finite() ? ExtendedReal::finite(lambda_ * v.value()) : v;
  }
  Vector conj_grad(const Vector& y) const { return lambda_ * base_.conj_grad(y); }

 private:
  ReferenceFunction base_;
  double lambda_;
};

struct ProductBlock {
  ReferenceFunction reference;
  double lambda = 1.0;
};

/// phi(x_1, ..., x_m) = sum_i (lambda_i ⋆ phi_i)(x_i).
ReferenceFunction product(std::span<const ProductBlock> blocks);

/// alpha * phi + <c, .>. Its conjugate is (alpha ⋆ phi*)(. - c).
ReferenceFunction tilt_scale(const ReferenceFunction& base, double alpha, const Vector& c);

/// Largest ||grad phi*(grad phi(x)) - x||_inf over `sample_count` points drawn
/// uniformly from [-radius, radius]^n. Deterministic for a fixed seed.
double legendre_roundtrip_check(const ReferenceFunction& phi, int sample_count, std::uint64_t seed,
                                double radius = 5.0);

}  // namespace aprox
