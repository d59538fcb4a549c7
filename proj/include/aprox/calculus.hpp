#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "aprox/numeric.hpp"
#include "aprox/reference.hpp"
#include "aprox/solver.hpp"

namespace aprox {

enum class CalculusRule { separable, relax, average, conic_exp, tilt_scale };

/// A block of a separable sum: f_i is anisotropically smooth relative to
/// `reference` with constant L.
struct SmoothBlock {
  ReferenceFunction reference;
  double L = 1.0;
};

/// sum_i f_i(x_i) is 1-smooth relative to the product of (1/L_i) ⋆ phi_i.
struct SeparableConstant {
  ReferenceFunction reference;
  double L = 1.0;
};

SeparableConstant combine_separable(std::span<const SmoothBlock> blocks);

struct CombineInputs {
  std::vector<double> weights;
  std::vector<double> constants;
  /// Reference shared by the combined functions (average, conic_exp).
  ReferenceFunction reference;
  /// relax: from constants[0] to constants[1]. tilt_scale: weights[0] is the scale.
};

/// Smoothness constant after applying a combination rule. Throws
/// CalculusError when the rule's hypotheses do not hold.
double combine_constants(CalculusRule rule, const CombineInputs& in);
double relax_constant(double from, double to);
double average_constant(std::span<const double> weights, std::span<const double> constants,
                        const ReferenceFunction& phi);
double conic_exp_constant(std::span<const double> weights, std::span<const double> constants,
                          const ReferenceFunction& phi);

struct SamplerOptions {
  /// Base points are drawn from [-radius, radius]^n.
  double radius = 3.0;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned workers = 0;
};

struct SamplerReport {
  /// max over pairs of f(x) minus the anisotropic majorizer at x.
  double worst_violation = -kInf;
  /// Largest |f(x_bar) - majorizer(x_bar)| / (1 + |f(x_bar)|).
  double tightness_residual = 0.0;
  long pairs = 0;
  /// Pairs dropped because grad f(x_bar) left int dom phi*.
  long skipped = 0;
};

/// Samples pairs (x, x_bar) with a per-pair seed derived from `seed`, so the
/// result does not depend on the worker count.
SamplerReport descent_inequality_sampler(const SmoothObjective& f, double L, long pair_count, std::uint64_t seed,
                                         const SamplerOptions& options = {});

struct DualCheckReport {
  bool passed = false;
  /// min over the grid of mu^{-1} (phi*)''(t) - (g*)''(t).
  double worst_margin = kInf;
};

/// Scalar surrogate of anisotropic strong convexity: mu^{-1} phi* - g* convex on
/// the grid, checked through second derivatives with tolerance 1e-12.
/// Grid points outside int dom phi* raise DomainError.
DualCheckReport strong_convexity_dual_check(const std::function<double(double)>& g_conj_curvature,
                                            const ReferenceFunction& phi, double mu, std::span<const double> grid);

/// ||grad - central difference||_inf / max(||grad||_inf, 1e-8) at x.
double gradient_check(const std::function<double(const Vector&)>& value,
                      const std::function<Vector(const Vector&)>& gradient, const Vector& x, double step = 1e-6);

/// 64-bit mixing used to derive per-item seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace aprox
