#pragma once

#include <Eigen/Core>
#include <cmath>
#include <compare>
#include <limits>

namespace aprox {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// ln(1 + e^t) without overflow.
inline double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

/// 1 / (1 + e^{-t}).
inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// x ln x with the convention 0 ln 0 = 0.
inline double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

/// An extended real value in (-inf, +inf]. +inf is carried as a tag so it
/// never masquerades as a large finite number.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  static constexpr ExtendedReal finite(double v) { return ExtendedReal(v, false); }
  static constexpr ExtendedReal infinity() { return ExtendedReal(0.0, true); }

  constexpr bool is_finite() const noexcept { return !infinite_; }
  constexpr bool is_infinite() const noexcept { return infinite_; }
  /// The finite value; +inf is mapped to IEEE infinity.
  constexpr double value() const noexcept { return infinite_ ? kInf : value_; }

  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend constexpr std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
    if (a.infinite_) return std::partial_ordering::greater;
    if (b.infinite_) return std::partial_ordering::less;
    return a.value_ <=> b.value_;
  }
  friend constexpr ExtendedReal operator+(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return finite(a.value_ + b.value_);
  }

 private:
  constexpr ExtendedReal(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_ = 0.0;
  bool infinite_ = false;
};

}  // namespace aprox
