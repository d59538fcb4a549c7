#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aprox/divergence.hpp"
#include "aprox/errors.hpp"
#include "aprox/reference.hpp"
#include "support.hpp"

using namespace aprox;
using test::vec;

namespace {

std::vector<ReferenceFunction> families(Index n) {
  Vector w(n);
  for (Index j = 0; j < n; ++j) w[j] = 0.5 + j;
  return {ReferenceFunction::euclidean(w), ReferenceFunction::exp(n), ReferenceFunction::sym_logistic(n),
          tilt_scale(ReferenceFunction::exp(n), 2.0, Vector::Constant(n, 0.3)),
          ReferenceFunction::sym_logistic(n).epi_scaled(0.7)};
}

}  // namespace

TEST_CASE("euclidean reference") {
  CHECK(ReferenceFunction::euclidean(vec({1})).grad(vec({3}))[0] == 3.0);
  CHECK(ReferenceFunction::euclidean(vec({2})).conj_grad(vec({4}))[0] == 2.0);
  CHECK(ReferenceFunction::euclidean(vec({1, 1})).value(vec({3, 4})) == 12.5);
  CHECK_THROWS_AS(ReferenceFunction::euclidean(vec({1, 0})), ConfigError);
  CHECK(ReferenceFunction::euclidean(vec({1, 2})).in_conj_interior(vec({1e300, -1e300})));
}

TEST_CASE("exp reference") {
  const auto e = ReferenceFunction::exp(2);
  CHECK(e.grad(vec({0, 0})) == vec({1, 1}));
  CHECK(e.conj_grad(vec({1, 1})) == vec({0, 0}));
  CHECK(ReferenceFunction::exp(1).conj_value(vec({1})).value() == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(ReferenceFunction::exp(1).conj_value(vec({0})).value() == 0.0);
  CHECK(ReferenceFunction::exp(1).conj_value(vec({-1})).is_infinite());
  try {
    e.conj_grad(vec({1, 0}));
    FAIL("expected a domain error");
  } catch (const DomainError& err) {
    CHECK(err.index() == 1);
  }
}

TEST_CASE("symmetrized logistic reference") {
  const auto s = ReferenceFunction::sym_logistic(1);
  CHECK(s.value(vec({0})) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
  CHECK(s.grad(vec({0}))[0] == 0.0);
  const double root = oracle::bisection([](double t) { return std::tanh(t / 2.0) - 0.5; }, -10.0, 10.0);
  CHECK(s.conj_grad(vec({0.5}))[0] == doctest::Approx(root).epsilon(1e-12));
  CHECK(s.conj_grad(vec({0.5}))[0] == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(s.conj_grad(vec({1.0})), DomainError);
  CHECK_THROWS_AS(s.conj_grad(vec({-1.5})), DomainError);
  // h*(1) uses 0 ln 0 = 0
  CHECK(s.conj_value(vec({1.0})).value() == doctest::Approx(0.0).epsilon(1e-15));
  for (double t : {50.0, -50.0, 800.0, -800.0}) {
    const double v = s.value(vec({t}));
    CHECK(std::isfinite(v));
    CHECK(v == doctest::Approx(oracle::symlog(t)).epsilon(1e-15));
  }
}

TEST_CASE("product reference") {
  const std::vector<ProductBlock> two_exp = {{ReferenceFunction::exp(1), 1.0}, {ReferenceFunction::exp(1), 1.0}};
  CHECK(product(two_exp).grad(vec({0, 0})) == vec({1, 1}));
  const std::vector<ProductBlock> quad = {{ReferenceFunction::euclidean(vec({1})), 2.0}};
  CHECK(product(quad).value(vec({2})) == doctest::Approx(1.0));
  const std::vector<ProductBlock> mixed = {{ReferenceFunction::exp(1), 1.0},
                                           {ReferenceFunction::euclidean(vec({1})), 1.0}};
  CHECK(product(mixed).conj_grad(vec({1, 3})) == vec({0, 3}));
  CHECK(product(mixed).family() == ReferenceFamily::mixed);
  CHECK_THROWS(product(std::vector<ProductBlock>{{ReferenceFunction::exp(1), 0.0}}));
}

TEST_CASE("tilt and scale") {
  oracle::Gen gen(3);
  const auto base = ReferenceFunction::sym_logistic(3);
  const auto same = tilt_scale(base, 1.0, Vector::Zero(3));
  for (int i = 0; i < 20; ++i) {
    const Vector x = test::random_vec(gen, 3, -4, 4);
    CHECK(same.value(x) == base.value(x));
    CHECK(same.grad(x) == base.grad(x));
  }
  CHECK(tilt_scale(ReferenceFunction::exp(1), 1.0, vec({1})).conj_grad(vec({2}))[0] == 0.0);
  CHECK(tilt_scale(ReferenceFunction::euclidean(vec({1})), 2.0, vec({0})).grad(vec({3}))[0] == 6.0);
  CHECK_THROWS(tilt_scale(base, 0.0, Vector::Zero(3)));
  // conjugate domain moves to c + alpha dom
  const auto shifted = tilt_scale(ReferenceFunction::exp(1), 2.0, vec({-1}));
  CHECK(shifted.in_conj_interior(vec({-0.5})));
  CHECK_FALSE(shifted.in_conj_interior(vec({-1.0})));
}

TEST_CASE("epi-scaled reference identities") {
  oracle::Gen gen(4);
  for (const auto& phi : families(3)) {
    for (double lambda : {0.3, 1.0, 4.0}) {
      const EpiScaledReference scaled(phi, lambda);
      const ReferenceFunction closed = phi.epi_scaled(lambda);
      for (int i = 0; i < 25; ++i) {
        const Vector x = test::random_vec(gen, 3, -3, 3);
        const double direct = lambda * phi.value(x / lambda);
        CHECK(std::abs(scaled.value(x) - direct) <= 1e-12 * (1.0 + std::abs(direct)));
        CHECK(std::abs(closed.value(x) - direct) <= 1e-12 * (1.0 + std::abs(direct)));
        CHECK((closed.grad(x) - phi.grad(x / lambda)).lpNorm<Eigen::Infinity>() <= 1e-12);
        const Vector y = phi.grad(x);
        CHECK((closed.conj_grad(y) - lambda * phi.conj_grad(y)).lpNorm<Eigen::Infinity>() <=
              1e-12 * (1.0 + x.lpNorm<Eigen::Infinity>() * lambda));
        CHECK(std::abs(closed.conj_value(y).value() - lambda * phi.conj_value(y).value()) <=
              1e-12 * (1.0 + std::abs(lambda * phi.conj_value(y).value())));
      }
    }
  }
}

TEST_CASE("Legendre round trip check") {
  CHECK(legendre_roundtrip_check(ReferenceFunction::exp(4), 100, 0) <= 1e-10);
  CHECK(legendre_roundtrip_check(ReferenceFunction::sym_logistic(4), 100, 0) <= 1e-8);
  CHECK(legendre_roundtrip_check(ReferenceFunction::euclidean(vec({1, 2, 4})), 100, 0) == 0.0);
  CHECK(legendre_roundtrip_check(ReferenceFunction::exp(4), 50, 9) ==
        legendre_roundtrip_check(ReferenceFunction::exp(4), 50, 9));
}

TEST_CASE("property: inverse gradients, Fenchel-Young, monotonicity, interior range") {
  oracle::Gen gen(5);
  for (const auto& phi : families(4)) {
    for (int i = 0; i < 200; ++i) {
      const Vector x = test::random_vec(gen, 4, -5, 5), z = test::random_vec(gen, 4, -5, 5);
      const Vector g = phi.grad(x);
      REQUIRE(phi.in_conj_interior(g));
      CHECK((phi.conj_grad(g) - x).lpNorm<Eigen::Infinity>() <= 1e-8);
      const double fy = phi.value(x) + phi.conj_value(g).value() - g.dot(x);
      CHECK(std::abs(fy) <= 1e-8 * (1.0 + std::abs(phi.value(x))));
      CHECK((g - phi.grad(z)).dot(x - z) >= -1e-12);
    }
  }
}

TEST_CASE("bregman distances") {
  const auto e = ReferenceFunction::exp(1);
  CHECK(bregman_dual(e, vec({0.5}), vec({0.5})).value() == 0.0);
  CHECK(bregman_dual(e, vec({1}), vec({2})).value() == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-15));
  CHECK(bregman_dual(e, vec({-1}), vec({1})).is_infinite());
  CHECK(bregman_dual(e, vec({1}), vec({0})).is_infinite());
  CHECK(bregman_dual(e, vec({0}), vec({2})).value() == doctest::Approx(2.0));
  CHECK(bregman_primal(ReferenceFunction::sym_logistic(2), vec({1, 2}), vec({1, 2})).value() == 0.0);
  CHECK(bregman_primal(ReferenceFunction::euclidean(vec({1})), vec({1}), vec({0})).value() == 0.5);
  CHECK(bregman_primal(e, vec({1}), vec({0})).value() == doctest::Approx(std::exp(1.0) - 2.0).epsilon(1e-15));
  CHECK(dual_identity_residual(e, vec({2}), vec({2})) == 0.0);
  CHECK(dual_identity_residual(e, vec({1}), vec({2})) <= 1e-12);
  CHECK(dual_identity_residual(ReferenceFunction::sym_logistic(1), vec({0.3}), vec({-0.4})) <= 1e-10);
  CHECK_THROWS_AS(dual_identity_residual(e, vec({0}), vec({2})), DomainError);
}

TEST_CASE("property: bregman nonnegativity, indiscernibles, KL, dual identity") {
  oracle::Gen gen(6);
  const auto e = ReferenceFunction::exp(3), s = ReferenceFunction::sym_logistic(3);
  for (int i = 0; i < 1000; ++i) {
    const auto xa = gen.vec(3, 0.01, 5.0), ya = gen.vec(3, 0.01, 5.0);
    const Vector x = Eigen::Map<const Vector>(xa.data(), 3), y = Eigen::Map<const Vector>(ya.data(), 3);
    const Vector u = test::random_vec(gen, 3, -0.99, 0.99), v = test::random_vec(gen, 3, -0.99, 0.99);
    const double kl = bregman_dual(e, x, y).value();
    CHECK(kl >= -1e-14);
    CHECK(std::abs(kl - oracle::kl(xa, ya)) <= 1e-12 * (1.0 + kl));
    CHECK(bregman_dual(s, u, v).value() >= -1e-14);
    CHECK(bregman_dual(e, x, x).value() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(bregman_primal(s, u, v).value() >= -1e-14);
    if ((x - y).lpNorm<Eigen::Infinity>() > 1e-3) CHECK(kl > 1e-12);
    CHECK(dual_identity_residual(e, x, y) <= 1e-9);
    CHECK(dual_identity_residual(s, u, v) <= 1e-9);
  }
}
