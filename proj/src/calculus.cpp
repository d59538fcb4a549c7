#include "aprox/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "aprox/errors.hpp"

namespace aprox {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 of the combined state
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SeparableConstant combine_separable(std::span<const SmoothBlock> blocks) {
  if (blocks.empty()) throw CalculusError("separable rule needs at least one block");
  std::vector<ProductBlock> parts;
  for (const auto& b : blocks) {
    if (!(b.L > 0.0) || !std::isfinite(b.L)) throw CalculusError("separable rule: block constants must be positive");
    parts.push_back({b.reference, 1.0 / b.L});
  }
  return {product(parts), 1.0};
}

double relax_constant(double from, double to) {
  if (!(from > 0.0)) throw CalculusError("relax: constants must be positive");
  if (!(to >= from)) throw CalculusError("relax: a smoothness constant can only be increased");
  return to;
}

namespace {

void require_pairs(std::span<const double> w, std::span<const double> L, const char* rule) {
  if (w.empty() || w.size() != L.size())
    throw CalculusError(std::string(rule) + ": need one weight per constant");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0.0)) throw CalculusError(std::string(rule) + ": weights must be nonnegative");
    if (!(L[i] > 0.0)) throw CalculusError(std::string(rule) + ": constants must be positive");
  }
}

}  // namespace

double average_constant(std::span<const double> weights, std::span<const double> constants,
                        const ReferenceFunction& phi) {
  require_pairs(weights, constants, "average");
  const auto fam = phi.family();
  if (fam != ReferenceFamily::sym_logistic && fam != ReferenceFamily::euclidean)
    throw CalculusError("average: the reference must have a jointly convex dual Bregman distance (symlog, euclidean)");
  double sum = 0.0;
  for (double w : weights) sum += w;
  if (std::abs(sum - 1.0) > 1e-12) throw CalculusError("average: weights must sum to 1");
  return *std::max_element(constants.begin(), constants.end());
}

double conic_exp_constant(std::span<const double> weights, std::span<const double> constants,
                          const ReferenceFunction& phi) {
  require_pairs(weights, constants, "conic_exp");
  if (phi.family() != ReferenceFamily::exp || !phi.untilted())
    throw CalculusError("conic_exp: only valid relative to the plain exponential reference");
  double sum = 0.0;
  for (double w : weights) sum += w;
  if (!(sum > 0.0)) throw CalculusError("conic_exp: weights must have a positive sum");
  return *std::max_element(constants.begin(), constants.end());
}

double combine_constants(CalculusRule rule, const CombineInputs& in) {
  switch (rule) {
    case CalculusRule::separable: {
      if (in.constants.empty()) throw CalculusError("separable rule needs at least one block");
      for (double L : in.constants)
        if (!(L > 0.0)) throw CalculusError("separable rule: block constants must be positive");
      return 1.0;  // relative to the product of (1/L_i) ⋆ phi_i
    }
    case CalculusRule::relax:
      if (in.constants.size() != 2) throw CalculusError("relax: need exactly two constants (from, to)");
      return relax_constant(in.constants[0], in.constants[1]);
    case CalculusRule::average: return average_constant(in.weights, in.constants, in.reference);
    case CalculusRule::conic_exp: return conic_exp_constant(in.weights, in.constants, in.reference);
    case CalculusRule::tilt_scale:
      if (in.constants.size() != 1) throw CalculusError("tilt_scale: need exactly one constant");
      if (!(in.constants[0] > 0.0)) throw CalculusError("tilt_scale: constant must be positive");
      if (!in.weights.empty() && !(in.weights[0] > 0.0)) throw CalculusError("tilt_scale: scale must be positive");
      return in.constants[0];
  }
  throw CalculusError("unknown calculus rule");
}

namespace {

struct PairOutcome {
  double violation = -kInf;
  double tightness = 0.0;
  bool skipped = false;
};

PairOutcome sample_pair(const SmoothObjective& f, double L, std::uint64_t pair_seed, double radius) {
  const Index n = f.dim();
  const ReferenceFunction& phi = f.reference;
  std::mt19937_64 rng(pair_seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector xbar(n), x(n);
  for (Index j = 0; j < n; ++j) xbar[j] = radius * unif(rng);
  // step lengths spread over three decades so both local and far pairs occur
  const double spread = radius * std::pow(10.0, -3.0 * (0.5 * (unif(rng) + 1.0)));
  for (Index j = 0; j < n; ++j) x[j] = xbar[j] + spread * unif(rng);

  PairOutcome out;
  const Vector grad = f.gradient(xbar);
  if (!phi.in_conj_interior(grad)) {
    out.skipped = true;
    return out;
  }
  const Vector d = phi.conj_grad(grad);
  const double fbar = f.value(xbar);
  const double base = phi.value(d) / L;
  auto majorizer = [&](const Vector& z) { return fbar + phi.value(L * (z - xbar) + d) / L - base; };
  out.violation = f.value(x) - majorizer(x);
  out.tightness = std::abs(fbar - majorizer(xbar)) / (1.0 + std::abs(fbar));
  return out;
}

}  // namespace

SamplerReport descent_inequality_sampler(const SmoothObjective& f, double L, long pair_count, std::uint64_t seed,
                                         const SamplerOptions& options) {
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("sampler: L must be positive");
  if (pair_count < 1) throw ConfigError("sampler: pair_count must be positive");
  if (!f.value || !f.gradient) throw ConfigError("sampler: objective needs value and gradient oracles");

  unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<long>(workers, pair_count));
  std::vector<SamplerReport> partial(workers);
  auto work = [&](unsigned w) {
    SamplerReport& r = partial[w];
    for (long p = w; p < pair_count; p += workers) {
      const PairOutcome o = sample_pair(f, L, derive_seed(seed, static_cast<std::uint64_t>(p)), options.radius);
      ++r.pairs;
      if (o.skipped) {
        ++r.skipped;
        continue;
      }
      r.worst_violation = std::max(r.worst_violation, o.violation);
      r.tightness_residual = std::max(r.tightness_residual, o.tightness);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  SamplerReport total;
  for (const auto& r : partial) {
    total.worst_violation = std::max(total.worst_violation, r.worst_violation);
    total.tightness_residual = std::max(total.tightness_residual, r.tightness_residual);
    total.pairs += r.pairs;
    total.skipped += r.skipped;
  }
  return total;
}

DualCheckReport strong_convexity_dual_check(const std::function<double(double)>& g_conj_curvature,
                                            const ReferenceFunction& phi, double mu, std::span<const double> grid) {
  if (phi.dim() != 1) throw ConfigError("strong convexity check is scalar: phi must be one-dimensional");
  if (!(mu > 0.0)) throw ConfigError("strong convexity check: mu must be positive");
  if (grid.empty()) throw ConfigError("strong convexity check: empty grid");
  DualCheckReport rep;
  const auto& psi = phi.coordinate(0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    if (!(psi.conj_boundary_distance(t) > 0.0))
      throw DomainError("strong convexity check: grid point outside int dom phi*", i);
    rep.worst_margin = std::min(rep.worst_margin, psi.conj_curvature(t) / mu - g_conj_curvature(t));
  }
  rep.passed = rep.worst_margin >= -1e-12;
  return rep;
}

double gradient_check(const std::function<double(const Vector&)>& value,
                      const std::function<Vector(const Vector&)>& gradient, const Vector& x, double step) {
  const Vector g = gradient(x);
  Vector fd(x.size());
  Vector probe = x;
  for (Index j = 0; j < x.size(); ++j) {
    const double h = step * std::max(1.0, std::abs(x[j]));
    probe[j] = x[j] + h;
    const double up = value(probe);
    probe[j] = x[j] - h;
    const double down = value(probe);
    probe[j] = x[j];
    fd[j] = (up - down) / (2.0 * h);
  }
  return (g - fd).lpNorm<Eigen::Infinity>() / std::max(g.lpNorm<Eigen::Infinity>(), 1e-8);
}

}  // namespace aprox
