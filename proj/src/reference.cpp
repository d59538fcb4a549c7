#include "aprox/reference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "aprox/errors.hpp"

namespace aprox {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double kernel_value(Kernel k, double w, double u) {
  switch (k) {
    case Kernel::quadratic: return 0.5 * w * u * u;
    case Kernel::exp: return std::exp(u);
    case Kernel::sym_logistic: {
      const double a = std::abs(u);
      return a + 2.0 * std::log1p(std::exp(-a));
    }
  }
  return 0.0;
}

double kernel_grad(Kernel k, double w, double u) {
  switch (k) {
    case Kernel::quadratic: return w * u;
    case Kernel::exp: return std::exp(u);
    case Kernel::sym_logistic: return std::tanh(0.5 * u);
  }
  return 0.0;
}

double kernel_curvature(Kernel k, double w, double u) {
  switch (k) {
    case Kernel::quadratic: return w;
    case Kernel::exp: return std::exp(u);
    case Kernel::sym_logistic: {
      const double th = std::tanh(0.5 * u);
      return 0.5 * (1.0 - th * th);
    }
  }
  return 0.0;
}

bool kernel_conj_domain(Kernel k, double s) {
  switch (k) {
    case Kernel::quadratic: return std::isfinite(s);
    case Kernel::exp: return s >= 0.0;
    case Kernel::sym_logistic: return s >= -1.0 && s <= 1.0;
  }
  return false;
}

double kernel_conj_distance(Kernel k, double s) {
  switch (k) {
    case Kernel::quadratic: return kInf;
    case Kernel::exp: return s;
    case Kernel::sym_logistic: return 1.0 - std::abs(s);
  }
  return 0.0;
}

double kernel_conj_value(Kernel k, double w, double s) {
  switch (k) {
    case Kernel::quadratic: return 0.5 * s * s / w;
    case Kernel::exp: return xlogx(s) - s;
    case Kernel::sym_logistic: return xlogx(1.0 + s) + xlogx(1.0 - s) - 2.0 * kLn2;
  }
  return 0.0;
}

double kernel_conj_grad(Kernel k, double w, double s) {
  switch (k) {
    case Kernel::quadratic: return s / w;
    case Kernel::exp: return std::log(s);
    case Kernel::sym_logistic: return 2.0 * std::atanh(s);
  }
  return 0.0;
}

double kernel_conj_curvature(Kernel k, double w, double s) {
  switch (k) {
    case Kernel::quadratic: return 1.0 / w;
    case Kernel::exp: return 1.0 / s;
    case Kernel::sym_logistic: return 2.0 / (1.0 - s * s);
  }
  return 0.0;
}

const char* kernel_name(Kernel k) {
  switch (k) {
    case Kernel::quadratic: return "euclidean";
    case Kernel::exp: return "exp";
    case Kernel::sym_logistic: return "symlog";
  }
  return "?";
}

}  // namespace

double CoordinateReference::value(double t) const {
  return scale * epi * kernel_value(kernel, weight, t / epi) + tilt * t;
}

double CoordinateReference::grad(double t) const {
  return scale * kernel_grad(kernel, weight, t / epi) + tilt;
}

double CoordinateReference::curvature(double t) const {
  return (scale / epi) * kernel_curvature(kernel, weight, t / epi);
}

ExtendedReal CoordinateReference::conj_value(double s) const {
  const double u = (s - tilt) / scale;
  if (!kernel_conj_domain(kernel, u)) return ExtendedReal::infinity();
  return ExtendedReal::finite(scale * epi * kernel_conj_value(kernel, weight, u));
}

double CoordinateReference::conj_grad(double s) const {
  return epi * kernel_conj_grad(kernel, weight, (s - tilt) / scale);
}

double CoordinateReference::conj_curvature(double s) const {
  return (epi / scale) * kernel_conj_curvature(kernel, weight, (s - tilt) / scale);
}

bool CoordinateReference::in_conj_domain(double s) const {
  return kernel_conj_domain(kernel, (s - tilt) / scale);
}

double CoordinateReference::conj_boundary_distance(double s) const {
  return scale * kernel_conj_distance(kernel, (s - tilt) / scale);
}

ReferenceFunction ReferenceFunction::from_coordinates(std::vector<CoordinateReference> coords) {
  if (coords.empty()) throw ConfigError("reference function needs dim >= 1");
  ReferenceFunction r;
  r.coords_ = std::make_shared<const std::vector<CoordinateReference>>(std::move(coords));
  return r;
}

ReferenceFunction ReferenceFunction::euclidean(const Vector& weights) {
  std::vector<CoordinateReference> coords;
  coords.reserve(static_cast<std::size_t>(weights.size()));
  for (Index j = 0; j < weights.size(); ++j) {
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j]))
      throw ConfigError("euclidean reference weight " + std::to_string(j) + " must be positive");
    coords.push_back({Kernel::quadratic, weights[j], 1.0, 1.0, 0.0});
  }
  return from_coordinates(std::move(coords));
}

ReferenceFunction ReferenceFunction::exp(Index dim) {
  if (dim < 1) throw ConfigError("reference function needs dim >= 1");
  return from_coordinates(std::vector<CoordinateReference>(static_cast<std::size_t>(dim),
                                                           {Kernel::exp, 1.0, 1.0, 1.0, 0.0}));
}

ReferenceFunction ReferenceFunction::sym_logistic(Index dim) {
  if (dim < 1) throw ConfigError("reference function needs dim >= 1");
  return from_coordinates(std::vector<CoordinateReference>(static_cast<std::size_t>(dim),
                                                           {Kernel::sym_logistic, 1.0, 1.0, 1.0, 0.0}));
}

ReferenceFunction ReferenceFunction::from_key(const std::string& key, Index dim) {
  if (key == "euclidean") return euclidean(Vector::Ones(dim));
  if (key == "exp") return exp(dim);
  if (key == "symlog") return sym_logistic(dim);
  throw ConfigError("unknown reference key '" + key + "' (expected euclidean, exp or symlog)");
}

void ReferenceFunction::require_dim(const Vector& v, const char* what) const {
  if (v.size() != dim())
    throw ConfigError(std::string(what) + ": dimension " + std::to_string(v.size()) + " != reference dimension " +
                      std::to_string(dim()));
}

double ReferenceFunction::value(const Vector& x) const {
  require_dim(x, "value");
  double acc = 0.0;
  for (Index j = 0; j < x.size(); ++j) acc += coordinate(j).value(x[j]);
  return acc;
}

Vector ReferenceFunction::grad(const Vector& x) const {
  require_dim(x, "grad");
  Vector g(x.size());
  for (Index j = 0; j < x.size(); ++j) g[j] = coordinate(j).grad(x[j]);
  return g;
}

ExtendedReal ReferenceFunction::conj_value(const Vector& y) const {
  require_dim(y, "conj_value");
  double acc = 0.0;
  for (Index j = 0; j < y.size(); ++j) {
    const auto v = coordinate(j).conj_value(y[j]);
    if (v.is_infinite()) return v;
    acc += v.value();
  }
  return ExtendedReal::finite(acc);
}

Vector ReferenceFunction::conj_grad(const Vector& y) const {
  require_dim(y, "conj_grad");
  Vector g(y.size());
  for (Index j = 0; j < y.size(); ++j) {
    const auto& c = coordinate(j);
    if (!(c.conj_boundary_distance(y[j]) > margin_))
      throw DomainError("conjugate gradient requested outside the interior of dom phi*",
                        static_cast<std::size_t>(j));
    g[j] = c.conj_grad(y[j]);
  }
  return g;
}

Vector ReferenceFunction::conj_curvature(const Vector& y) const {
  require_dim(y, "conj_curvature");
  Vector h(y.size());
  for (Index j = 0; j < y.size(); ++j) {
    const auto& c = coordinate(j);
    if (!(c.conj_boundary_distance(y[j]) > margin_))
      throw DomainError("conjugate curvature requested outside the interior of dom phi*",
                        static_cast<std::size_t>(j));
    h[j] = c.conj_curvature(y[j]);
  }
  return h;
}

bool ReferenceFunction::in_conj_domain(const Vector& y) const {
  require_dim(y, "in_conj_domain");
  for (Index j = 0; j < y.size(); ++j)
    if (!coordinate(j).in_conj_domain(y[j])) return false;
  return true;
}

bool ReferenceFunction::in_conj_interior(const Vector& y) const {
  return conj_boundary_distance(y) > margin_;
}

double ReferenceFunction::conj_boundary_distance(const Vector& y) const {
  require_dim(y, "conj_boundary_distance");
  double d = kInf;
  for (Index j = 0; j < y.size(); ++j) d = std::min(d, coordinate(j).conj_boundary_distance(y[j]));
  return d;
}

std::pair<Vector, int> ReferenceFunction::clamp_into_interior(const Vector& y, double eta, double tolerance) const {
  require_dim(y, "clamp_into_interior");
  Vector out = y;
  int moved = 0;
  for (Index j = 0; j < y.size(); ++j) {
    const auto& c = coordinate(j);
    const double d = c.conj_boundary_distance(y[j]);
    if (d > margin_ || d < -tolerance) continue;
    const double target = (eta + margin_) / c.scale;
    const double u = (y[j] - c.tilt) / c.scale;
    double clamped = u;
    switch (c.kernel) {
      case Kernel::quadratic: continue;
      case Kernel::exp: clamped = target; break;
      case Kernel::sym_logistic: clamped = std::copysign(1.0 - target, u); break;
    }
    out[j] = c.tilt + c.scale * clamped;
    ++moved;
  }
  return {std::move(out), moved};
}

ReferenceFunction ReferenceFunction::epi_scaled(double lambda) const {
  if (!(lambda > 0.0)) throw ConfigError("epi-scaling needs lambda > 0");
  std::vector<CoordinateReference> coords(coords_->begin(), coords_->end());
  for (auto& c : coords) c.epi *= lambda;
  auto r = from_coordinates(std::move(coords));
  r.margin_ = margin_;
  return r;
}

ReferenceFunction ReferenceFunction::with_domain_margin(double margin) const {
  if (!(margin >= 0.0)) throw ConfigError("domain margin must be nonnegative");
  ReferenceFunction r = *this;
  r.margin_ = margin;
  return r;
}

ReferenceFamily ReferenceFunction::family() const {
  const Kernel k = coordinate(0).kernel;
  for (const auto& c : coordinates())
    if (c.kernel != k) return ReferenceFamily::mixed;
  switch (k) {
    case Kernel::quadratic: return ReferenceFamily::euclidean;
    case Kernel::exp: return ReferenceFamily::exp;
    case Kernel::sym_logistic: return ReferenceFamily::sym_logistic;
  }
  return ReferenceFamily::mixed;
}

bool ReferenceFunction::untilted() const {
  return std::all_of(coordinates().begin(), coordinates().end(),
                     [](const CoordinateReference& c) { return c.scale == 1.0 && c.tilt == 0.0; });
}

std::string ReferenceFunction::describe() const {
  std::ostringstream os;
  const auto fam = family();
  os << (fam == ReferenceFamily::mixed ? "mixed" : kernel_name(coordinate(0).kernel)) << "(n=" << dim() << ")";
  return os.str();
}

EpiScaledReference::EpiScaledReference(ReferenceFunction base, double lambda)
    : base_(std::move(base)), lambda_(lambda) {
  if (!(lambda > 0.0)) throw ConfigError("epi-scaling needs lambda > 0");
}

ReferenceFunction product(std::span<const ProductBlock> blocks) {
  if (blocks.empty()) throw ConfigError("product reference needs at least one block");
  std::vector<CoordinateReference> coords;
  double margin = 0.0;
  for (const auto& b : blocks) {
    if (!(b.lambda > 0.0)) throw ConfigError("product block scale must be positive");
    if (b.reference.dim() < 1) throw ConfigError("product block has no coordinates");
    margin = std::max(margin, b.reference.domain_margin());
    for (auto c : b.reference.coordinates()) {
      c.epi *= b.lambda;
      coords.push_back(c);
    }
  }
  return ReferenceFunction::from_coordinates(std::move(coords)).with_domain_margin(margin);
}

ReferenceFunction tilt_scale(const ReferenceFunction& base, double alpha, const Vector& c) {
  if (!(alpha > 0.0)) throw ConfigError("tilt_scale needs alpha > 0");
  if (c.size() != base.dim()) throw ConfigError("tilt vector dimension does not match the reference");
  std::vector<CoordinateReference> coords(base.coordinates().begin(), base.coordinates().end());
  for (std::size_t j = 0; j < coords.size(); ++j) {
    coords[j].scale *= alpha;
    coords[j].tilt = alpha * coords[j].tilt + c[static_cast<Index>(j)];
  }
  return ReferenceFunction::from_coordinates(std::move(coords)).with_domain_margin(base.domain_margin());
}

double legendre_roundtrip_check(const ReferenceFunction& phi, int sample_count, std::uint64_t seed, double radius) {
  if (sample_count < 1) throw ConfigError("legendre_roundtrip_check needs sample_count >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-radius, radius);
  double worst = 0.0;
  Vector x(phi.dim());
  for (int s = 0; s < sample_count; ++s) {
    for (Index j = 0; j < x.size(); ++j) x[j] = unif(rng);
    const Vector back = phi.conj_grad(phi.grad(x));
    worst = std::max(worst, (back - x).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

}  // namespace aprox
