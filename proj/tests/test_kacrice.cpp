#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spinlab/errors.hpp"
#include "spinlab/kacrice.hpp"
#include "spinlab/variational.hpp"

using namespace spinlab;

namespace {
const Mixture kMixed34({0, 0, 1, std::sqrt(0.5)});  // q^3 + 0.5 q^4
const Mixture kThree({0, 0, 1});                    // q^3
}  // namespace

TEST_CASE("kappa matches direct quadrature of the semicircle log-potential") {
  for (double x : {0.0, 1.0, 2.0, 3.0, 5.0}) {
    CHECK(kappa(x) == doctest::Approx(oracles::kappa_quad(x)).epsilon(1e-8));
  }
  // even function, continuous across the bulk edge
  CHECK(kappa(-3.0) == doctest::Approx(kappa(3.0)).epsilon(1e-14));
  CHECK(kappa(2.0 + 1e-9) == doctest::Approx(kappa(2.0 - 1e-9)).epsilon(1e-7));
}

TEST_CASE("kappa_prime closed form: right inverse of a + 1/a") {
  for (double a : {1.5, 2.0, 3.0}) {
    CHECK(kappa_prime(a + 1.0 / a) == doctest::Approx(1.0 / a).epsilon(1e-10));
  }
  CHECK(kappa_prime(1.0) == doctest::Approx(0.5).epsilon(1e-14));  // bulk: x/2
  CHECK(kappa_prime(-2.5) == doctest::Approx(-kappa_prime(2.5)).epsilon(1e-14));
  // consistency with kappa by central differences away from the edge
  for (double x : {0.7, 3.1}) {
    double h = 1e-6;
    double fd = (kappa(x + h) - kappa(x - h)) / (2 * h);
    CHECK(kappa_prime(x) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("theta and xi_two vanish at the 1RSB ground-state parameters") {
  auto p = onersb_params(kMixed34);
  CHECK(std::fabs(theta(kMixed34, p.E0, p.R0)) <= 1e-9);
  CHECK(std::fabs(xi_two(kMixed34, 0.0, p.E0, p.E0, p.R0, p.R0)) <= 1e-8);
  // stationarity in R at the same point
  double h = 1e-5;
  double d = (theta(kMixed34, p.E0, p.R0 + h) - theta(kMixed34, p.E0, p.R0 - h)) / (2 * h);
  CHECK(std::fabs(d) <= 1e-6);
}

TEST_CASE("pure mixtures need the perturbation switch") {
  auto p = onersb_params(kThree);
  CHECK_THROWS_AS(theta(kThree, p.E0, p.R0), domain_error);
  // with the iota correction the identity still holds to the iota scale
  double v = theta(kThree, p.E0, p.R0, true, 1e-5);
  CHECK(std::fabs(v) < 1e-3);
}

TEST_CASE("band regression coefficients v_q") {
  auto v0 = v_q(kMixed34, 0.0);
  CHECK(v0.first == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v0.second == doctest::Approx(0.0).epsilon(1e-12));
  auto v1 = v_q(kMixed34, 1.0);
  CHECK(v1.first == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::fabs(v1.second) <= 1e-10);
  // the E-coefficient grows from 0 to 1 along q
  double prev = 0.0;
  for (double q : {0.2, 0.5, 0.8, 0.95}) {
    auto v = v_q(kMixed34, q);
    CHECK(v.first > prev);
    CHECK(v.first < 1.0);
    prev = v.first;
  }
}

TEST_CASE("theta decomposes as M(R) - K1 (E - K2 R)^2") {
  auto split = theta_split(kMixed34);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> eD(-3.0, 3.0), rD(2.5, 9.0);
  for (int i = 0; i < 100; ++i) {
    double E = eD(rng), R = rD(rng);
    double lhs = theta(kMixed34, E, R);
    double rhs = split.M(R) - split.K1 * (E - split.K2 * R) * (E - split.K2 * R);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("rate function: zero at E0, R+ increasing, theta+ decreasing") {
  auto p = onersb_params(kMixed34);
  CHECK(std::fabs(theta_star(kMixed34, p.E0)) <= 1e-8);
  CHECK(r_star(kMixed34, p.E0) == doctest::Approx(p.R0).epsilon(1e-6));
  CHECK_THROWS_AS(r_star(kMixed34, p.E0 - 0.01), domain_error);

  auto curve = rate_curve(kMixed34, p.E0, p.E0 + 1.0, 20);
  REQUIRE(curve.size() == 20);
  for (size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].r_star > curve[i - 1].r_star);
    CHECK(curve[i].theta_star < curve[i - 1].theta_star);
  }
}

TEST_CASE("tilted ground state: GS(0) recovers the plain zt value") {
  double base = minimize_zt(kMixed34).value;
  double g0 = tilted_gs(kMixed34, 4, 0.0);
  CHECK(g0 == doctest::Approx(base).epsilon(2e-3));
  // monotone nondecreasing in the tilt
  double g1 = tilted_gs(kMixed34, 4, 0.5);
  double g2 = tilted_gs(kMixed34, 4, 1.0);
  CHECK(g1 >= g0 - 1e-9);
  CHECK(g2 >= g1 - 1e-9);
  // the linear term must eventually win
  CHECK(tilted_gs(kMixed34, 4, 50.0) >= g0 + 5.0);
  CHECK_THROWS_AS(tilted_gs(kMixed34, 2, 0.5), domain_error);
}
