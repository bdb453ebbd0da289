#include <doctest.h>

#include <random>

#include "rhloc/cost.hpp"
#include "rhloc/sync_solver.hpp"
#include "support.hpp"

using namespace rhloc;

TEST_CASE("stacked layout") {
  StackedVariables z(2, 3, 2, 4);
  CHECK(z.data().size() == 2 * (3 + 2 + 4));
  z.y()(1, 0) = 7.0;
  CHECK(z.data()(2 * 3 + 1) == 7.0);
  z.w()(0, 3) = 5.0;
  CHECK(z.data()(2 * (3 + 2 + 3)) == 5.0);
}

TEST_CASE("costs at the truth of a noiseless scenario vanish") {
  const auto s = testing::corner_network(1);
  for (auto loss : {LossFamily::quadratic(), LossFamily::absolute(), LossFamily::huber()}) {
    CHECK(nonconvex_cost_g(s.truth, s, loss) == doctest::Approx(0.0).epsilon(1e-24));
    CHECK(convex_cost_f(s.truth, s, loss) == doctest::Approx(0.0).epsilon(1e-24));
  }
}

TEST_CASE("single edge hand values") {
  auto s = testing::tiny_path();
  Positions x = s.truth;
  x(0, 1) += 0.1;  // stretch edge 0-1, shrink edge 1-2
  const double d01 = (x.col(0) - x.col(1)).norm() - s.edges[0].range;
  const double d12 = (x.col(1) - x.col(2)).norm() - s.edges[1].range;
  REQUIRE(d01 > 0.0);
  REQUIRE(d12 < 0.0);
  const auto q = LossFamily::quadratic();
  CHECK(nonconvex_cost_g(x, s, q) == doctest::Approx(0.5 * (d01 * d01 + d12 * d12)));
  CHECK(convex_cost_f(x, s, q) == doctest::Approx(0.5 * d01 * d01));
}

TEST_CASE("f underestimates g, with equality when no discrepancy is negative") {
  const auto s = testing::noisy_corner_network(2);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const Positions x = testing::uniform_positions(rng, 2, s.sensor_count(), -0.5, 1.5);
    for (auto loss : {LossFamily::quadratic(), LossFamily::absolute(), LossFamily::huber()}) {
      CHECK(convex_cost_f(x, s, loss) <= nonconvex_cost_g(x, s, loss));
    }
  }
  // Spread positions far apart: every discrepancy positive.
  const Positions far = 50.0 * testing::uniform_positions(rng, 2, s.sensor_count(), -1.0, 1.0);
  CHECK(convex_cost_f(far, s, LossFamily::huber()) == nonconvex_cost_g(far, s, LossFamily::huber()));
}

TEST_CASE("inner minimisation turns F into f") {
  const auto s = testing::noisy_corner_network(3);
  std::mt19937_64 rng(6);
  for (int k = 0; k < 50; ++k) {
    const Positions x = testing::uniform_positions(rng, 2, s.sensor_count(), 0.0, 1.0);
    const auto z = inner_minimized(x, s);
    CHECK(is_feasible(z, s, 1e-12));
    CHECK(cost_F(z, s) == doctest::Approx(convex_cost_f(x, s, LossFamily::huber())).epsilon(1e-12));
    // Any other feasible auxiliary does no better.
    auto other = z;
    other.y().setRandom();
    other.w().setRandom();
    other = project_feasible(other, s);
    CHECK(cost_F(other, s) >= cost_F(z, s) - 1e-12);
  }
}

TEST_CASE("projection onto the feasible set") {
  const auto s = testing::noisy_corner_network(4);
  auto z = StackedVariables::zeros_like(s);
  z.data().setConstant(10.0);
  CHECK_FALSE(is_feasible(z, s));
  const auto p = project_feasible(z, s);
  CHECK(is_feasible(p, s, 1e-12));
  CHECK(p.x() == z.x());
  for (int e = 0; e < p.edges(); ++e) CHECK(p.y().col(e).norm() == doctest::Approx(s.edges[e].range));
}

TEST_CASE("gradient matches finite differences") {
  const auto s = testing::noisy_corner_network(5);
  std::mt19937_64 rng(7);
  auto z = StackedVariables::zeros_like(s);
  std::normal_distribution<double> n(0.0, 0.5);
  for (Eigen::Index k = 0; k < z.data().size(); ++k) z.data()(k) = n(rng);
  z = project_feasible(z, s);
  const auto g = grad_F(z, s);
  const double h = 1e-6;
  for (Eigen::Index k = 0; k < z.data().size(); ++k) {
    auto plus = z;
    auto minus = z;
    plus.data()(k) += h;
    minus.data()(k) -= h;
    const double fd = (cost_F(plus, s) - cost_F(minus, s)) / (2 * h);
    CHECK(fd == doctest::Approx(g.data()(k)).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("per-node costs add up to F") {
  const auto s = testing::noisy_corner_network(6);
  const auto inc = build_incidence(s);
  std::mt19937_64 rng(8);
  const auto z = inner_minimized(testing::uniform_positions(rng, 2, s.sensor_count(), 0.0, 1.0), s);
  double total = 0.0;
  for (int i = 0; i < s.sensor_count(); ++i) total += per_node_cost(i, z, s, inc);
  CHECK(total == doctest::Approx(cost_F(z, s)).epsilon(1e-12));
}

TEST_CASE("projected gradient residual vanishes at a minimiser only") {
  const auto s = testing::noisy_corner_network(7);
  const double lipschitz = lipschitz_constant(build_incidence(s));
  SyncOptions opts;
  opts.max_iters = 20000;
  opts.tol = 1e-14;
  const auto run = run_sync(s, random_init(s, 1), opts);
  CHECK(projected_gradient_residual(run.z, s, lipschitz) < 1e-6);
  auto off = run.z;
  off.x()(0, 0) += 0.2;
  CHECK(projected_gradient_residual(off, s, lipschitz) > 1e-3);
}
