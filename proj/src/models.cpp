#include "aprox/models.hpp"

#include <algorithm>
#include <cmath>

#include "aprox/errors.hpp"

namespace aprox {

namespace {

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be positive");
}

}  // namespace

double logistic_constant(const Matrix& A) {
  double L = 0.0;
  for (Index i = 0; i < A.rows(); ++i) L = std::max(L, A.row(i).squaredNorm());
  return std::max(L, kLogisticLFloor);
}

ProblemBundle build_logistic(const Matrix& A, const Vector& b, LogisticRegularization reg) {
  const Index m = A.rows(), n = A.cols();
  if (m < 1 || n < 1) throw ConfigError("logistic model needs at least one row and one column");
  if (b.size() != m) throw ConfigError("logistic model: label count does not match the rows of A");
  for (Index i = 0; i < m; ++i) {
    if (b[i] != 1.0 && b[i] != -1.0)
      throw ConfigError("logistic model: label " + std::to_string(i) + " is not +1 or -1");
    for (Index j = 0; j < n; ++j)
      if (!(A(i, j) >= -1.0 && A(i, j) <= 1.0))
        throw ConfigError("logistic model: entry (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") outside [-1, 1]");
  }

  auto value = [A, b](const Vector& x) {
    const Vector margins = b.cwiseProduct(A * x);
    double acc = 0.0;
    for (Index i = 0; i < margins.size(); ++i) acc += softplus(-margins[i]);
    return acc / static_cast<double>(margins.size());
  };
  auto gradient = [A, b](const Vector& x) {
    const Vector margins = b.cwiseProduct(A * x);
    Vector weights(margins.size());
    for (Index i = 0; i < margins.size(); ++i) weights[i] = -b[i] * sigmoid(-margins[i]);
    Vector g = A.transpose() * weights;
    return Vector(g / static_cast<double>(margins.size()));
  };

  ProblemBundle out{{value, gradient, ReferenceFunction::sym_logistic(n), logistic_constant(A), true},
                    Regularizer::zero(n), "logistic"};
  switch (reg.kind) {
    case LogisticRegularization::Kind::none: break;
    case LogisticRegularization::Kind::l1:
      out.g = Regularizer::l1(n, reg.nu);
      out.name = "logistic+l1";
      break;
    case LogisticRegularization::Kind::sql2:
      out.g = Regularizer::squared_l2(n, reg.nu);
      out.name = "logistic+sql2";
      break;
  }
  return out;
}

ExpLpModel make_exp_lp(const Matrix& A, const Vector& b, const Vector& c, double sigma) {
  require_sigma(sigma);
  if (A.rows() < 1 || A.cols() < 1) throw ConfigError("exp-LP needs a nonempty A");
  if (b.size() != A.rows() || c.size() != A.cols()) throw ConfigError("exp-LP: dimension mismatch");
  if ((A.array() < 0.0).any()) throw ConfigError("exp-LP: A must be nonnegative (use the lifted model otherwise)");
  for (Index j = 0; j < A.cols(); ++j) {
    if (!(A.col(j).maxCoeff() > 0.0))
      throw ConfigError("exp-LP: column " + std::to_string(j) +
                        " of A has no positive entry, so the range condition fails");
    if (!(c[j] < 0.0))
      throw ConfigError("exp-LP: constraint qualification needs c < 0 (coordinate " + std::to_string(j) + ")");
  }
  ExpLpModel m{A, b, c, sigma, 0.0};
  for (Index i = 0; i < A.rows(); ++i) m.L = std::max(m.L, A.row(i).lpNorm<1>() / sigma);
  return m;
}

double exp_lp_objective(const Matrix& A, const Vector& b, const Vector& c, double sigma, const Vector& x) {
  const Vector u = (A * x - b) / sigma;
  return sigma * u.array().exp().sum() + c.dot(x);
}

Vector exp_lp_gradient(const Matrix& A, const Vector& b, const Vector& c, double sigma, const Vector& x) {
  const Vector w = ((A * x - b) / sigma).array().exp().matrix();
  return A.transpose() * w + c;
}

ProblemBundle build_exp_lp(const ExpLpModel& model) {
  const Matrix A = model.A;
  const Vector b = model.b;
  const double sigma = model.sigma;
  auto value = [A, b, sigma](const Vector& x) { return sigma * ((A * x - b) / sigma).array().exp().sum(); };
  auto gradient = [A, b, sigma](const Vector& x) {
    const Vector w = ((A * x - b) / sigma).array().exp().matrix();
    return Vector(A.transpose() * w);
  };
  return {{value, gradient, ReferenceFunction::exp(A.cols()), model.L, true}, Regularizer::linear(model.c), "exp-lp"};
}

ProblemBundle build_exp_lp(const Matrix& A, const Vector& b, const Vector& c, double sigma) {
  return build_exp_lp(make_exp_lp(A, b, c, sigma));
}

LiftedExpLpModel make_lifted_exp_lp(const Matrix& A, const Vector& b, const Vector& c, double sigma, double epsilon,
                                    bool allow_zero_columns) {
  require_sigma(sigma);
  if (A.rows() < 1 || A.cols() < 1) throw ConfigError("lifted exp-LP needs a nonempty A");
  if (b.size() != A.rows() || c.size() != A.cols()) throw ConfigError("lifted exp-LP: dimension mismatch");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("lifting shift epsilon must be >= 0");

  LiftedExpLpModel m;
  m.A = A;
  m.b = b;
  m.c = c;
  m.sigma = sigma;
  m.epsilon = epsilon;
  m.A_plus = A.cwiseMax(0.0);
  m.A_minus = (-A).cwiseMax(0.0);
  m.c_plus = c.cwiseMax(0.0);
  m.c_minus = (-c).cwiseMax(0.0);
  if ((m.A_plus - m.A_minus) != A)
    throw ConfigError("lifted exp-LP: split does not reconstruct A");
  if ((m.c_plus - m.c_minus) != c) throw ConfigError("lifted exp-LP: split does not reconstruct c");

  if (epsilon == 0.0 && !allow_zero_columns) {
    for (Index j = 0; j < A.cols(); ++j) {
      if (!(m.A_plus.col(j).sum() > 0.0) || !(m.A_minus.col(j).sum() > 0.0))
        throw ConfigError("lifted exp-LP: column " + std::to_string(j) +
                          " of A+ or A- is zero; a positive shift epsilon is required");
    }
  }
  m.A_plus.array() += epsilon;
  m.A_minus.array() += epsilon;
  m.c_plus.array() += epsilon;
  m.c_minus.array() += epsilon;

  for (Index i = 0; i < A.rows(); ++i)
    m.L = std::max(m.L, (m.A_plus.row(i).lpNorm<1>() + m.A_minus.row(i).lpNorm<1>()) / sigma);
  return m;
}

ProblemBundle build_lifted_exp_lp(const LiftedExpLpModel& model) {
  const Index n = model.n();
  const Matrix Ap = model.A_plus, Am = model.A_minus;
  const Vector b = model.b, cp = model.c_plus, cm = model.c_minus;
  const double sigma = model.sigma;
  auto value = [=](const Vector& z) {
    const Vector u = (Ap * z.head(n) + Am * z.tail(n) - b) / sigma;
    return sigma * u.array().exp().sum() + cp.dot(z.head(n)) + cm.dot(z.tail(n));
  };
  auto gradient = [=](const Vector& z) {
    const Vector w = ((Ap * z.head(n) + Am * z.tail(n) - b) / sigma).array().exp().matrix();
    Vector g(2 * n);
    g.head(n) = Ap.transpose() * w + cp;
    g.tail(n) = Am.transpose() * w + cm;
    return g;
  };
  const ProductBlock blocks[] = {{ReferenceFunction::exp(n), 1.0}, {ReferenceFunction::exp(n), 1.0}};
  return {{value, gradient, product(blocks), model.L, true}, Regularizer::consensus(n), "lifted-exp-lp"};
}

Vector parallel_update_step(const LiftedExpLpModel& model, double lambda, const Vector& x, int* floor_events) {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (x.size() != model.n()) throw ConfigError("parallel_update_step: dimension mismatch");
  const Vector w = ((model.A_plus * x - model.A_minus * x - model.b) / model.sigma).array().exp().matrix();
  Vector delta = model.A_plus.transpose() * w + model.c_plus;
  Vector delta_minus = model.A_minus.transpose() * w + model.c_minus;
  constexpr double kFloor = 1e-300;
  for (Index j = 0; j < x.size(); ++j) {
    for (double* d : {&delta[j], &delta_minus[j]}) {
      if (*d < kFloor) {
        if (model.epsilon > 0.0)
          throw NumericError("parallel update: Delta vanished although the lifting shift is positive",
                             static_cast<std::size_t>(j));
        *d = kFloor;
        if (floor_events) ++*floor_events;
      }
    }
  }
  Vector out(x.size());
  for (Index j = 0; j < x.size(); ++j)
    out[j] = x[j] - (lambda / 2.0) * (std::log(delta[j]) - std::log(delta_minus[j]));
  return out;
}

OtDualModel make_ot_dual(const Matrix& C, const Vector& r, const Vector& s, double sigma, OtMode mode) {
  require_sigma(sigma);
  if (C.rows() < 1 || C.cols() < 1) throw ConfigError("OT dual needs a nonempty cost matrix");
  if (r.size() != C.cols() || s.size() != C.rows())
    throw ConfigError("OT dual: r must have one entry per column of C and s one per row");
  if (!(r.array() > 0.0).all() || !(s.array() > 0.0).all())
    throw ConfigError("OT dual: marginals must be strictly positive");
  if (!C.allFinite()) throw ConfigError("OT dual: cost matrix must be finite");
  return {C, r, s, sigma, mode};
}

namespace {

// exp((alpha_j + beta_i - C_ij) / sigma) as an m x n array.
Eigen::ArrayXXd ot_kernel(const OtDualModel& m, const Vector& alpha, const Vector& beta) {
  Eigen::ArrayXXd t = (-m.C).array();
  t.rowwise() += alpha.transpose().array();
  t.colwise() += beta.array();
  return (t / m.sigma).exp();
}

}  // namespace

double ot_dual_objective(const OtDualModel& model, const Vector& alpha, const Vector& beta) {
  return model.sigma * ot_kernel(model, alpha, beta).sum() - model.r.dot(alpha) - model.s.dot(beta);
}

ProblemBundle build_ot_dual(const OtDualModel& model) {
  const Index n = model.C.cols(), m = model.C.rows();
  const OtDualModel mdl = model;
  auto value = [mdl, n, m](const Vector& z) {
    return mdl.sigma * ot_kernel(mdl, z.head(n), z.tail(m)).sum();
  };
  auto gradient = [mdl, n, m](const Vector& z) {
    const Eigen::ArrayXXd k = ot_kernel(mdl, z.head(n), z.tail(m));
    Vector g(n + m);
    g.head(n) = k.colwise().sum().transpose().matrix();
    g.tail(m) = k.rowwise().sum().matrix();
    return g;
  };
  Vector c(n + m);
  c.head(n) = -model.r;
  c.tail(m) = -model.s;
  return {{value, gradient, ReferenceFunction::exp(n + m), 2.0 / model.sigma, true}, Regularizer::linear(c),
          "ot-dual"};
}

ProblemBundle build_ot_dual_folded(const OtDualModel& model) {
  ProblemBundle base = build_ot_dual(model);
  const Vector c = base.g.coefficients();
  auto inner_value = base.f.value;
  auto inner_grad = base.f.gradient;
  base.f.value = [inner_value, c](const Vector& z) { return inner_value(z) + c.dot(z); };
  base.f.gradient = [inner_grad, c](const Vector& z) { return Vector(inner_grad(z) + c); };
  base.f.reference = tilt_scale(base.f.reference, 1.0, c);
  base.g = Regularizer::zero(c.size());
  base.name = "ot-dual-folded";
  return base;
}

ProblemBundle ot_block(const OtDualModel& model, bool alpha_block, const Vector& other) {
  const OtDualModel mdl = model;
  const Vector fixed = other;
  if (alpha_block) {
    if (other.size() != model.C.rows()) throw ConfigError("ot_block: beta has the wrong length");
    auto value = [mdl, fixed](const Vector& a) { return mdl.sigma * ot_kernel(mdl, a, fixed).sum(); };
    auto gradient = [mdl, fixed](const Vector& a) {
      return Vector(ot_kernel(mdl, a, fixed).colwise().sum().transpose().matrix());
    };
    return {{value, gradient, ReferenceFunction::exp(model.C.cols()), 1.0 / model.sigma, true},
            Regularizer::linear(-model.r), "ot-alpha-block"};
  }
  if (other.size() != model.C.cols()) throw ConfigError("ot_block: alpha has the wrong length");
  auto value = [mdl, fixed](const Vector& bta) { return mdl.sigma * ot_kernel(mdl, fixed, bta).sum(); };
  auto gradient = [mdl, fixed](const Vector& bta) {
    return Vector(ot_kernel(mdl, fixed, bta).rowwise().sum().matrix());
  };
  return {{value, gradient, ReferenceFunction::exp(model.C.rows()), 1.0 / model.sigma, true},
          Regularizer::linear(-model.s), "ot-beta-block"};
}

std::vector<OtIterate> ot_gauss_seidel(const OtDualModel& model, int sweeps, const Vector& alpha0,
                                       const Vector& beta0) {
  if (sweeps < 0) throw ConfigError("sweeps must be nonnegative");
  std::vector<OtIterate> out{{alpha0, beta0}};
  Vector alpha = alpha0, beta = beta0;
  const double lambda = model.sigma;  // 1/L for each block
  for (int k = 0; k < sweeps; ++k) {
    {
      const ProblemBundle p = ot_block(model, true, beta);
      alpha = backward_step(p.g, p.f.reference, lambda, forward_step(p.f, lambda, alpha)).point;
    }
    {
      const ProblemBundle p = ot_block(model, false, alpha);
      beta = backward_step(p.g, p.f.reference, lambda, forward_step(p.f, lambda, beta)).point;
    }
    out.push_back({alpha, beta});
  }
  return out;
}

}  // namespace aprox
