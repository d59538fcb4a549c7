#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aprox/calculus.hpp"
#include "aprox/errors.hpp"
#include "aprox/harness/experiment.hpp"
#include "aprox/harness/generators.hpp"
#include "aprox/models.hpp"
#include "support.hpp"

using namespace aprox;
using test::vec;

namespace {

Matrix mat(Index rows, Index cols, std::initializer_list<double> values) {
  Matrix M(rows, cols);
  auto it = values.begin();
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = *it++;
  return M;
}

/// f(x) - majorizer(x) around x_bar, written directly from the definition.
double descent_residual(const SmoothObjective& f, double L, const Vector& x, const Vector& xbar) {
  const ReferenceFunction scaled = f.reference.epi_scaled(1.0 / L);
  const Vector d = f.reference.conj_grad(f.gradient(xbar)) / L;
  return f.value(x) - (f.value(xbar) + scaled.value(x - xbar + d) - scaled.value(d));
}

}  // namespace

TEST_CASE("logistic model") {
  const ProblemBundle flat = build_logistic(mat(1, 1, {0}), vec({1}), {});
  CHECK(flat.f.value(vec({3})) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(flat.f.gradient(vec({3}))[0] == 0.0);
  CHECK(*flat.f.L == kLogisticLFloor);

  const ProblemBundle one = build_logistic(mat(1, 1, {1}), vec({1}), {});
  CHECK(one.f.gradient(vec({0}))[0] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(*build_logistic(mat(2, 1, {1, -1}), vec({1, 1}), {}).f.L == 1.0);
  CHECK(logistic_constant(mat(2, 2, {0.5, 0.5, 1, -1})) == 2.0);

  CHECK_THROWS_AS(build_logistic(mat(1, 1, {1.5}), vec({1}), {}), ConfigError);
  CHECK_THROWS_AS(build_logistic(mat(1, 1, {0.5}), vec({0}), {}), ConfigError);
  CHECK(build_logistic(mat(1, 1, {1}), vec({1}), {LogisticRegularization::Kind::l1, 0.1}).g.kind() ==
        Regularizer::Kind::l1);

  // gradients stay inside (-1, 1) even far out
  const ProblemBundle toy = logistic_toy({});
  oracle::Gen gen(1);
  for (int i = 0; i < 100; ++i) CHECK(toy.f.reference.in_conj_interior(toy.f.gradient(test::random_vec(gen, 10, -50, 50))));
  CHECK(std::isfinite(toy.f.value(Vector::Constant(10, 1e6))));
}

TEST_CASE("exponential LP model") {
  const ProblemBundle lp = build_exp_lp(mat(1, 1, {1}), vec({0}), vec({-1}), 1.0);
  CHECK(lp.f.value(vec({0})) + lp.g.value(vec({0})) == 1.0);
  CHECK(lp.f.gradient(vec({0}))[0] == 1.0);
  CHECK(ReferenceFunction::exp(1).epi_scaled(2.0).value(vec({0})) == 2.0);
  CHECK(make_exp_lp(mat(1, 2, {0.5, 0.5}), vec({0}), vec({-1, -1}), 0.1).L == doctest::Approx(10.0));
  CHECK_THROWS_AS(make_exp_lp(mat(2, 2, {1, 0, 1, 0}), vec({0, 0}), vec({-1, -1}), 1.0), ConfigError);
  CHECK_THROWS_AS(make_exp_lp(mat(1, 1, {-1}), vec({0}), vec({-1}), 1.0), ConfigError);
  CHECK_THROWS_AS(make_exp_lp(mat(1, 1, {1}), vec({0}), vec({1}), 1.0), ConfigError);
  // a zero entry is fine while every column has a positive one
  CHECK_NOTHROW(make_exp_lp(mat(2, 2, {1, 0, 0, 1}), vec({0, 0}), vec({-1, -1}), 1.0));
}

TEST_CASE("lifted exponential LP") {
  CHECK_THROWS_AS(make_lifted_exp_lp(mat(1, 1, {1}), vec({0}), vec({-1}), 1.0, 0.0), ConfigError);
  const double eps = 1e-8;
  const LiftedExpLpModel m = make_lifted_exp_lp(mat(1, 2, {1, -1}), vec({0}), vec({0, 0}), 1.0, eps);
  CHECK(m.A_plus == mat(1, 2, {1 + eps, eps}));
  CHECK(m.A_minus == mat(1, 2, {eps, 1 + eps}));
  CHECK((m.A_plus - m.A_minus - m.A).lpNorm<Eigen::Infinity>() <= 1e-15);
  CHECK(m.L == doctest::Approx((2.0 + 4 * eps) / 1.0).epsilon(1e-15));

  const ExpLpData d = generate_exp_lp(6, 4, 3, 0.2);
  const LiftedExpLpModel model = make_lifted_exp_lp(d.A, d.b, d.c, d.sigma);
  const ProblemBundle lifted = build_lifted_exp_lp(model);
  CHECK(lifted.g.kind() == Regularizer::Kind::consensus_lifted);
  for (Index j = 0; j < 4; ++j) {
    CHECK(model.A_plus.col(j).sum() > 0.0);
    CHECK(model.A_minus.col(j).sum() > 0.0);
  }
  // on the consensus set the lifted objective equals the original one
  oracle::Gen gen(2);
  for (int i = 0; i < 20; ++i) {
    const Vector x = test::random_vec(gen, 4, -0.3, 0.3);
    Vector z(8);
    z << x, -x;
    const double orig = exp_lp_objective(d.A, d.b, d.c, d.sigma, x);
    CHECK(lifted.f.value(z) == doctest::Approx(orig).epsilon(1e-6));
  }
}

TEST_CASE("parallel update equals the lifted iteration") {
  const ExpLpData d = generate_exp_lp(8, 5, 4, 0.5);
  const LiftedExpLpModel model = make_lifted_exp_lp(d.A, d.b, d.c, d.sigma);
  const ProblemBundle lifted = build_lifted_exp_lp(model);
  const double lambda = 1.0 / model.L;
  Vector x = Vector::Zero(5);
  Vector z = Vector::Zero(10);
  for (int k = 0; k < 50; ++k) {
    x = parallel_update_step(model, lambda, x);
    z = backward_step(lifted.g, lifted.f.reference, lambda, forward_step(lifted.f, lambda, z)).point;
    CHECK((z.head(5) - x).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK((z.tail(5) + x).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("parallel update special cases") {
  // symmetric data: Delta = Delta_- so nothing moves
  const LiftedExpLpModel sym = make_lifted_exp_lp(mat(2, 1, {1, -1}), vec({0, 0}), vec({0}), 1.0, 0.0);
  CHECK(parallel_update_step(sym, 1.0, vec({0}))[0] == 0.0);
  // boosting fixed point: x+ = x - (1/2)(x - (-x)) = 0
  for (double x0 : {-2.0, 0.3, 5.0}) CHECK(std::abs(parallel_update_step(sym, 1.0, vec({x0}))[0]) <= 1e-15);
  // zero split column with epsilon = 0 is floored and counted
  const LiftedExpLpModel zero = make_lifted_exp_lp(mat(1, 1, {1}), vec({0}), vec({0}), 1.0, 0.0, true);
  int events = 0;
  const Vector x = parallel_update_step(zero, 1.0, vec({0}), &events);
  CHECK(events == 1);
  CHECK(std::isfinite(x[0]));
}

TEST_CASE("OT dual") {
  const OtDualModel tiny = make_ot_dual(mat(1, 1, {0}), vec({1}), vec({1}), 1.0, OtMode::gauss_seidel);
  const auto sweeps = ot_gauss_seidel(tiny, 3, vec({0.7}), vec({-2}));
  CHECK(std::abs(sweeps[1].alpha[0] + sweeps[1].beta[0]) <= 1e-15);
  CHECK(sweeps[1].alpha[0] == doctest::Approx(2.0));
  CHECK(sweeps[2].alpha[0] == sweeps[1].alpha[0]);

  const OtData d = generate_ot(5, 5, 0);
  const OtDualModel joint = make_ot_dual(d.C, d.r, d.s, 0.1, OtMode::joint);
  CHECK(*build_ot_dual(joint).f.L == doctest::Approx(20.0));
  CHECK(*ot_block(joint, true, Vector::Zero(5)).f.L == doctest::Approx(10.0));
  CHECK_THROWS_AS(make_ot_dual(d.C, -d.r, d.s, 0.1, OtMode::joint), ConfigError);

  // folded and split forms produce the same iterates
  const ProblemBundle split = build_ot_dual(joint), folded = build_ot_dual_folded(joint);
  SolverConfig cfg;
  cfg.max_iter = 30;
  cfg.gap_tol = 0.0;
  cfg.keep_iterates = true;
  const auto a = run_fixed(split.f, split.g, cfg, Vector::Zero(10));
  const auto b = run_fixed(folded.f, folded.g, cfg, Vector::Zero(10));
  for (std::size_t k = 0; k < a.iterates.size(); ++k)
    CHECK((a.iterates[k] - b.iterates[k]).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("Gauss-Seidel steps reproduce Sinkhorn") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const OtData d = generate_ot(5, 5, seed);
    const auto pg = ot_gauss_seidel(make_ot_dual(d.C, d.r, d.s, 0.1, OtMode::gauss_seidel), 100, Vector::Zero(5),
                                    Vector::Zero(5));
    std::vector<double> C(25);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) C[i * 5 + j] = d.C(i, j);
    const auto sk = oracle::sinkhorn(C, 5, 5, std::vector<double>(d.r.data(), d.r.data() + 5),
                                     std::vector<double>(d.s.data(), d.s.data() + 5), 0.1, 100);
    for (std::size_t k = 0; k < sk.size(); ++k)
      for (int j = 0; j < 5; ++j) {
        CHECK(std::abs(pg[k].alpha[j] - sk[k].alpha[j]) <= 1e-8);
        CHECK(std::abs(pg[k].beta[j] - sk[k].beta[j]) <= 1e-8);
      }
    const auto lib = sinkhorn_scaling(d.C, d.r, d.s, 0.1, 100);
    CHECK((0.1 * lib.back().first.array().log().matrix() - pg.back().alpha).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("constant calculus") {
  CHECK(combine_constants(CalculusRule::average, {{0.5, 0.5}, {2, 3}, ReferenceFunction::sym_logistic(1)}) == 3.0);
  CHECK(combine_constants(CalculusRule::conic_exp, {{10, 7}, {2, 3}, ReferenceFunction::exp(1)}) == 3.0);
  CHECK_THROWS_AS(combine_constants(CalculusRule::relax, {{}, {2, 1}, {}}), CalculusError);
  CHECK(combine_constants(CalculusRule::relax, {{}, {1, 2}, {}}) == 2.0);
  CHECK_THROWS_AS(combine_constants(CalculusRule::average, {{0.5, 0.5}, {2, 3}, ReferenceFunction::exp(1)}),
                  CalculusError);
  CHECK_THROWS_AS(combine_constants(CalculusRule::average, {{0.5, 0.4}, {2, 3}, ReferenceFunction::sym_logistic(1)}),
                  CalculusError);
  CHECK_THROWS_AS(combine_constants(CalculusRule::conic_exp, {{0, 0}, {2, 3}, ReferenceFunction::exp(1)}),
                  CalculusError);
  CHECK_THROWS_AS(combine_constants(CalculusRule::conic_exp, {{1, 1}, {2, 3}, ReferenceFunction::sym_logistic(1)}),
                  CalculusError);

  const std::vector<SmoothBlock> blocks = {{ReferenceFunction::exp(1), 2.0}, {ReferenceFunction::exp(2), 4.0}};
  const SeparableConstant sep = combine_separable(blocks);
  CHECK(sep.L == 1.0);
  CHECK(sep.reference.dim() == 3);
  CHECK(sep.reference.value(vec({0.2, -0.4, 1.0})) ==
        doctest::Approx(0.5 * std::exp(0.4) + 0.25 * (std::exp(-1.6) + std::exp(4.0))).epsilon(1e-14));
}

TEST_CASE("strong convexity through the conjugate") {
  const auto phi = ReferenceFunction::sym_logistic(1);
  std::vector<double> grid;
  for (int i = -99; i <= 99; ++i) grid.push_back(i / 100.0);
  const double nu = 0.3;
  const auto sq = [nu](double) { return 1.0 / nu; };
  CHECK(strong_convexity_dual_check(sq, phi, 2.0 * nu, grid).passed);
  const auto fail = strong_convexity_dual_check(sq, phi, 2.0 * nu + 0.1, grid);
  CHECK_FALSE(fail.passed);
  CHECK(fail.worst_margin == doctest::Approx(2.0 / (2.0 * nu + 0.1) - 1.0 / nu));
  for (double mu : {0.01, 1.0, 100.0})
    CHECK(strong_convexity_dual_check([](double) { return 0.0; }, phi, mu, grid).passed);
  CHECK_THROWS_AS(strong_convexity_dual_check(sq, phi, 1.0, std::vector<double>{0.0, 1.0}), DomainError);
}

TEST_CASE("descent sampler") {
  std::vector<ProblemBundle> problems = {logistic_toy({}), logistic_sharp(), exp_sum_toy(),
                                         lifted_exp_lp_toy(8, 5, 0, 0.5), ot_joint_toy(4, 3, 1, 0.5)};
  const OtDualModel ot = make_ot_dual(generate_ot(4, 3, 1).C, generate_ot(4, 3, 1).r, generate_ot(4, 3, 1).s, 0.5,
                                      OtMode::gauss_seidel);
  problems.push_back(ot_block(ot, true, Vector::Constant(4, 0.2)));
  for (const auto& p : problems) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto rep = descent_inequality_sampler(p.f, *p.f.L, 10000, seed, {3.0, 2});
      CHECK(rep.worst_violation <= 1e-8);
      CHECK(rep.tightness_residual <= 1e-12);
      CHECK(rep.pairs == 10000);
    }
  }
  CHECK(descent_inequality_sampler(logistic_sharp().f, 0.5 * *logistic_sharp().f.L, 10000, 0).worst_violation > 0.0);
  CHECK(descent_inequality_sampler(exp_sum_toy().f, 0.5 * *exp_sum_toy().f.L, 10000, 0).worst_violation > 0.0);

  const auto one = descent_inequality_sampler(exp_sum_toy().f, 3.0, 2000, 7, {3.0, 1});
  const auto many = descent_inequality_sampler(exp_sum_toy().f, 3.0, 2000, 7, {3.0, 4});
  CHECK(one.worst_violation == many.worst_violation);
  CHECK_THROWS_AS(descent_inequality_sampler(exp_sum_toy().f, 0.0, 10, 0), ConfigError);
}

TEST_CASE("property: descent residual is shift invariant") {
  const ProblemBundle p = logistic_toy({});
  oracle::Gen gen(3);
  const Vector a = test::random_vec(gen, 10, -1, 1);
  SmoothObjective shifted = p.f;
  shifted.value = [f = p.f.value, a](const Vector& x) { return f(x - a); };
  shifted.gradient = [g = p.f.gradient, a](const Vector& x) { return g(x - a); };
  for (int i = 0; i < 200; ++i) {
    const Vector xbar = test::random_vec(gen, 10, -3, 3), x = test::random_vec(gen, 10, -3, 3);
    const double base = descent_residual(p.f, *p.f.L, x, xbar);
    CHECK(descent_residual(shifted, *p.f.L, x + a, xbar + a) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("gradient oracles match finite differences") {
  const ExpLpData d = generate_exp_lp(8, 5, 0, 0.5);
  const OtData ot = generate_ot(4, 5, 0);
  const OtDualModel joint = make_ot_dual(ot.C, ot.r, ot.s, 0.5, OtMode::joint);
  const std::vector<SmoothObjective> objectives = {
      logistic_toy({}).f, logistic_tiny({}).f, exp_sum_toy().f, lifted_exp_lp_toy(8, 5, 0, 0.5).f,
      build_ot_dual(joint).f, build_ot_dual_folded(joint).f, ot_block(joint, false, Vector::Constant(5, 0.1)).f};
  oracle::Gen gen(4);
  for (const auto& f : objectives)
    for (int i = 0; i < 100; ++i) CHECK(gradient_check(f.value, f.gradient, test::random_vec(gen, f.dim(), -1, 1)) <= 1e-5);
  for (int i = 0; i < 100; ++i)
    CHECK(gradient_check([&](const Vector& x) { return exp_lp_objective(d.A, d.b, d.c, d.sigma, x); },
                         [&](const Vector& x) { return exp_lp_gradient(d.A, d.b, d.c, d.sigma, x); },
                         test::random_vec(gen, 5, -1, 1)) <= 1e-5);
}
