#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spinlab/errors.hpp"
#include "spinlab/subag.hpp"

using namespace spinlab;

namespace {
const Mixture kFrsb({0, 1, 0, std::sqrt(0.08)});  // q^2 + 0.08 q^4
}

TEST_CASE("config validation") {
  Mixture m({0, 1});
  Hamiltonian h(m, 40, 1);
  AscentConfig bad;
  bad.eta = 0.3;  // 1/eta not an integer
  CHECK_THROWS_AS(hessian_ascent(h, bad), domain_error);
  bad.eta = 0.6;  // > 1/2
  CHECK_THROWS_AS(hessian_ascent(h, bad), domain_error);
  bad.eta = 0.0;
  CHECK_THROWS_AS(hessian_ascent(h, bad), domain_error);
  // N * eta < 1 is rejected
  Hamiltonian tiny(m, 10, 1);
  AscentConfig small;
  small.eta = 0.05;
  CHECK_THROWS_AS(hessian_ascent(tiny, small), domain_error);
}

TEST_CASE("radius grows exactly and increments stay orthogonal") {
  Hamiltonian h(kFrsb, 60, 5);
  AscentConfig cfg;
  cfg.eta = 0.1;
  cfg.seed = 3;
  cfg.record_trajectory = true;
  auto res = hessian_ascent(h, cfg);
  const int N = 60;
  REQUIRE(res.trajectory.size() == 11);  // x_0 .. x_{10}
  for (int j = 0; j <= 10; ++j) {
    double want = j * cfg.eta * N;
    CHECK(std::fabs(res.trajectory[j].squaredNorm() - want) <= 1e-9 * (want + 1.0));
  }
  CHECK(std::fabs(res.x.squaredNorm() - double(N)) <= 1e-9 * N);
  for (int j = 0; j < 10; ++j) {
    Eigen::VectorXd inc = res.trajectory[j + 1] - res.trajectory[j];
    CHECK(std::fabs(inc.dot(res.trajectory[j])) <= 1e-9 * N);
  }
}

TEST_CASE("per-step energy never drops more than the curvature slack") {
  Hamiltonian h(kFrsb, 80, 9);
  AscentConfig cfg;
  cfg.eta = 0.05;
  cfg.seed = 4;
  cfg.record_trajectory = true;
  auto res = hessian_ascent(h, cfg);
  double slack = 0.05 * cfg.eta * 80 * std::sqrt(kFrsb.xi(1.0, 2));
  for (size_t j = 0; j + 1 < res.trajectory.size(); ++j) {
    double before = h.value(res.trajectory[j]);
    double after = h.value(res.trajectory[j + 1]);
    CHECK(after >= before - slack);
  }
  CHECK(res.energy_density == doctest::Approx(h.value(res.x) / 80.0).epsilon(1e-12));
}

TEST_CASE("ascent is deterministic in the seed") {
  Hamiltonian h(kFrsb, 50, 2);
  AscentConfig cfg;
  cfg.eta = 0.1;
  cfg.seed = 12;
  auto a = hessian_ascent(h, cfg);
  auto b = hessian_ascent(h, cfg);
  CHECK((a.x - b.x).norm() == 0.0);
  cfg.seed = 13;
  auto c = hessian_ascent(h, cfg);
  CHECK((a.x - c.x).norm() > 0.0);
}

TEST_CASE("many_runs: k=1 reduction and exact overlap diagonal") {
  Hamiltonian h(kFrsb, 50, 7);
  AscentConfig cfg;
  cfg.eta = 0.1;
  cfg.seed = 21;
  auto batch = many_runs(h, 3, cfg);
  REQUIRE(batch.points.size() == 3);
  REQUIRE(batch.overlaps.rows() == 3);
  for (int r = 0; r < 3; ++r) {
    CHECK(batch.overlaps(r, r) == 1.0);
    CHECK(batch.energies[r] == doctest::Approx(h.value(batch.points[r]) / 50.0).epsilon(1e-12));
    for (int s = 0; s < r; ++s) {
      double direct = batch.points[r].dot(batch.points[s]) / 50.0;
      CHECK(batch.overlaps(r, s) == doctest::Approx(direct).epsilon(1e-14));
      CHECK(batch.overlaps(r, s) == batch.overlaps(s, r));
    }
  }
  auto one = many_runs(h, 1, cfg);
  REQUIRE(one.points.size() == 1);
  CHECK(std::fabs(one.points[0].squaredNorm() - 50.0) <= 1e-9 * 50.0);
}

TEST_CASE("small-size sanity: energy clears a loose fraction of the target") {
  // The asymptotic guarantee is integral of sqrt(xi''); at N=100 just ask for
  // well over half of it.
  Hamiltonian h(kFrsb, 100, 3);
  AscentConfig cfg;
  cfg.eta = 0.05;
  cfg.seed = 8;
  auto res = hessian_ascent(h, cfg);
  double target = quad::adaptive_simpson(
      [](double q) { return std::sqrt(kFrsb.xi(q, 2)); }, 0.0, 1.0, 1e-10, 40);
  CHECK(res.energy_density >= 0.6 * target);
}
