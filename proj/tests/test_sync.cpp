#include <doctest.h>

#include "rhloc/sync_solver.hpp"
#include "support.hpp"

using namespace rhloc;

namespace {

NetworkScenario outlier_scenario(std::uint64_t seed) {
  return apply_noise(testing::corner_network(seed), OutlierNoise{0.04, {7}, 4.0}, seed + 17);
}

}  // namespace

TEST_CASE("momentum schedule") {
  CHECK(momentum(1) == doctest::Approx(-0.5));
  CHECK(momentum(2) == 0.0);
  CHECK(momentum(5) == doctest::Approx(0.5));
  CHECK(momentum(1000) < 1.0);
}

TEST_CASE("init checks shape and starts inside the balls") {
  const auto s = outlier_scenario(1);
  CHECK_THROWS_AS(sync_init(s, Positions::Zero(2, 3)), std::invalid_argument);
  const auto state = sync_init(s, 5);
  const auto z = state.stacked(s);
  CHECK(is_feasible(z, s, 1e-12));
  CHECK(state.t == 0);
  CHECK(state.messages == 0);
}

TEST_CASE("random init is seeded and inside the bounding box") {
  const auto s = outlier_scenario(2);
  const auto a = random_init(s, 9);
  CHECK(a == random_init(s, 9));
  CHECK_FALSE(a == random_init(s, 10));
  CHECK(a.minCoeff() >= 0.0);
  CHECK(a.maxCoeff() <= 1.0);
}

TEST_CASE("edge copies stay exact negatives") {
  const auto s = outlier_scenario(3);
  const double lipschitz = lipschitz_constant(build_incidence(s));
  auto state = sync_init(s, 3);
  for (int t = 0; t < 200; ++t) {
    sync_step(state, lipschitz);
    for (const auto& node : state.nodes) {
      for (const auto& slot : node.edges) {
        const auto& peer = state.nodes[slot.neighbor];
        for (const auto& mirror : peer.edges) {
          if (mirror.edge == slot.edge) REQUIRE((mirror.y == -slot.y));
        }
      }
    }
  }
}

TEST_CASE("message count per round") {
  const auto s = outlier_scenario(4);
  const double lipschitz = lipschitz_constant(build_incidence(s));
  auto state = sync_init(s, 1);
  sync_step(state, lipschitz);
  CHECK(state.messages == sync_round_messages(s));
  CHECK(sync_round_messages(s) == 2 * static_cast<std::int64_t>(s.edges.size()) * 2);
  sync_step(state, lipschitz);
  CHECK(state.messages == 2 * sync_round_messages(s));
}

TEST_CASE("iterates remain feasible") {
  const auto s = outlier_scenario(5);
  const double lipschitz = lipschitz_constant(build_incidence(s));
  auto state = sync_init(s, 2);
  for (int t = 0; t < 100; ++t) {
    sync_step(state, lipschitz);
    CHECK(is_feasible(state.stacked(s), s, 1e-12));
  }
}

TEST_CASE("run converges and matches the rate bound on a small instance") {
  const auto s = outlier_scenario(6);
  const auto init = random_init(s, 4);
  SyncOptions ref_opts;
  ref_opts.max_iters = 30000;
  ref_opts.tol = 1e-15;
  const auto ref = run_sync(s, init, ref_opts);
  const double f_star = ref.trace.back().cost;
  const double lipschitz = lipschitz_constant(build_incidence(s));
  const auto z0 = sync_init(s, init).stacked(s);
  const double radius2 = (z0.data() - ref.z.data()).squaredNorm();
  for (const auto& row : ref.trace) {
    if (row.iter == 0 || row.iter > 2000) continue;
    const double t = static_cast<double>(row.iter);
    CHECK(row.cost - f_star <= 2.0 * lipschitz * radius2 / ((t + 1) * (t + 1)) + 1e-12);
  }

  SyncOptions opts;
  const auto run = run_sync(s, init, opts);
  CHECK(run.converged);
  CHECK(run.iterations < opts.max_iters);
  CHECK(run.trace.size() == static_cast<std::size_t>(run.iterations + 1));
  CHECK(run.messages == run.iterations * sync_round_messages(s));
  CHECK(run.trace.back().cost - f_star <= 1e-6 * f_star + 1e-12);
}

TEST_CASE("non-convergence is reported, not thrown") {
  const auto s = outlier_scenario(7);
  SyncOptions opts;
  opts.max_iters = 3;
  const auto run = run_sync(s, random_init(s, 1), opts);
  CHECK_FALSE(run.converged);
  CHECK(run.iterations == 3);
  opts.tol = 0.0;
  CHECK_THROWS_AS(run_sync(s, random_init(s, 1), opts), std::invalid_argument);
}

TEST_CASE("starting at the optimum stays there") {
  const auto s = testing::corner_network(8);  // noiseless, F* = 0 at the truth
  SyncOptions opts;
  opts.max_iters = 50;
  const auto run = run_sync(s, s.truth, opts);
  CHECK(run.trace.front().cost == doctest::Approx(0.0).epsilon(1e-28));
  CHECK(run.converged);
  CHECK((run.positions - s.truth).norm() < 1e-12);
}
