#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "rhloc/netmodel.hpp"
#include "rhloc/scenario_io.hpp"
#include "support.hpp"

using namespace rhloc;

TEST_CASE("normalize orients and sorts") {
  auto s = testing::tiny_path();
  std::swap(s.edges[0], s.edges[1]);
  std::swap(s.edges[0].i, s.edges[0].j);
  std::swap(s.links[0], s.links[1]);
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  normalize(s);
  CHECK_NOTHROW(validate(s));
  CHECK(s.edges[0].i == 0);
  CHECK(s.edges[0].j == 1);
  CHECK(s.edges[1].i == 1);
  CHECK(s.links[0].node == 0);
}

TEST_CASE("validate rejects broken scenarios") {
  const auto good = testing::tiny_path();
  CHECK_NOTHROW(validate(good));

  SUBCASE("dimension") {
    auto s = good;
    s.dim = 4;
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
  }
  SUBCASE("self loop") {
    auto s = good;
    s.edges.push_back({2, 2, 0.1, 0.1});
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
  }
  SUBCASE("duplicate edge") {
    auto s = good;
    s.edges.push_back(s.edges.back());
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
  }
  SUBCASE("nonpositive range") {
    auto s = good;
    s.edges[0].range = 0.0;
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
  }
  SUBCASE("nonpositive radius") {
    auto s = good;
    s.links[0].radius = -1.0;
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
  }
  SUBCASE("disconnected") {
    auto s = good;
    s.edges.pop_back();
    CHECK_THROWS_WITH_AS(validate(s), "graph is not connected", std::invalid_argument);
  }
  SUBCASE("no anchor link") {
    auto s = good;
    s.links.clear();
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
  }
  SUBCASE("unknown anchor") {
    auto s = good;
    s.links[1].anchor = 5;
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
  }
}

TEST_CASE("corner anchors") {
  CHECK(corner_anchors(1, 1.0).cols() == 2);
  CHECK(corner_anchors(2, 1.0).cols() == 4);
  CHECK(corner_anchors(3, 2.0).cols() == 8);
  CHECK(corner_anchors(3, 2.0).maxCoeff() == 2.0);
  CHECK_THROWS_AS(corner_anchors(0, 1.0), std::invalid_argument);
}

TEST_CASE("generator is seeded, connected and uses true ranges") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = testing::corner_network(seed);
    CHECK_NOTHROW(validate(s));
    CHECK(s.anchor_count() == 4);
    for (const auto& e : s.edges) {
      const double d = (s.truth.col(e.i) - s.truth.col(e.j)).norm();
      CHECK(e.range == d);
      CHECK(d <= 0.5);
      CHECK(e.radius == 0.1);
    }
  }
  const auto a = testing::corner_network(7);
  const auto b = testing::corner_network(7);
  CHECK(a.truth == b.truth);
  CHECK(a.edges.size() == b.edges.size());
}

TEST_CASE("generator gives up on impossible radii") {
  GeneratorConfig cfg;
  cfg.comm_radius = 1e-6;
  cfg.anchors = corner_anchors(2, 1.0);
  cfg.max_attempts = 5;
  CHECK_THROWS_WITH_AS(generate_geometric_network(cfg, 1), "cannot produce connected scenario",
                       std::runtime_error);
  cfg.comm_radius = 0.0;
  CHECK_THROWS_AS(generate_geometric_network(cfg, 1), std::invalid_argument);
}

TEST_CASE("noise models") {
  const auto s = testing::corner_network(3);
  const int faulty = 4;

  SUBCASE("deterministic given the seed") {
    const auto a = apply_noise(s, GaussianNoise{0.04}, 11);
    const auto b = apply_noise(s, GaussianNoise{0.04}, 11);
    const auto c = apply_noise(s, GaussianNoise{0.04}, 12);
    for (std::size_t k = 0; k < a.edges.size(); ++k) CHECK(a.edges[k].range == b.edges[k].range);
    bool differs = false;
    for (std::size_t k = 0; k < a.edges.size(); ++k) differs |= a.edges[k].range != c.edges[k].range;
    CHECK(differs);
  }
  SUBCASE("zero sigma keeps true ranges") {
    const auto a = apply_noise(s, GaussianNoise{0.0}, 5);
    for (std::size_t k = 0; k < a.links.size(); ++k) CHECK(a.links[k].range == s.links[k].range);
  }
  SUBCASE("bias is exact on faulty measurements only") {
    const auto a = apply_noise(s, BiasNoise{0.04, {faulty}, 0.1}, 5);
    const auto g = apply_noise(s, GaussianNoise{0.04}, 5);
    for (std::size_t k = 0; k < a.edges.size(); ++k) {
      const auto& e = a.edges[k];
      if (e.i == faulty || e.j == faulty) {
        CHECK(e.range == doctest::Approx(0.1 * s.edges[k].range).epsilon(1e-15));
      } else {
        CHECK(e.range == g.edges[k].range);
      }
    }
  }
  SUBCASE("outlier noise touches only faulty measurements") {
    const auto a = apply_noise(s, OutlierNoise{0.04, {faulty}, 4.0}, 5);
    const auto g = apply_noise(s, GaussianNoise{0.04}, 5);
    for (std::size_t k = 0; k < a.edges.size(); ++k) {
      const auto& e = a.edges[k];
      if (e.i != faulty && e.j != faulty) CHECK(e.range == g.edges[k].range);
    }
  }
  SUBCASE("bad parameters") {
    CHECK_THROWS_AS(apply_noise(s, GaussianNoise{-1.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(apply_noise(s, OutlierNoise{0.1, {99}, 4.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(apply_noise(s, BiasNoise{0.1, {0}, 0.0}, 1), std::invalid_argument);
  }
}

TEST_CASE("incidence structure") {
  const auto s = testing::corner_network(9);
  const auto inc = build_incidence(s);
  const Eigen::MatrixXi table = inc.dense_table(static_cast<int>(s.edges.size()));
  CHECK(table.rows() == static_cast<Eigen::Index>(s.edges.size()));
  CHECK(table.cols() == s.sensor_count());
  for (int e = 0; e < table.rows(); ++e) {
    CHECK(table.row(e).sum() == 0);
    CHECK(table(e, s.edges[e].i) == 1);
    CHECK(table(e, s.edges[e].j) == -1);
  }
  // Gram matrix of the incidence table is the graph Laplacian.
  const Eigen::MatrixXi lap = table.transpose() * table;
  int max_degree = 0;
  for (int i = 0; i < s.sensor_count(); ++i) {
    CHECK(lap(i, i) == inc.degree(i));
    max_degree = std::max(max_degree, inc.degree(i));
  }
  CHECK(inc.max_degree == max_degree);
  CHECK(lipschitz_constant(inc) == 2.0 + 2.0 * inc.max_degree + inc.max_anchor_count);

  auto no_links = testing::tiny_path();
  no_links.links.clear();
  CHECK_THROWS_AS(lipschitz_constant(build_incidence(no_links)), std::invalid_argument);
}

TEST_CASE("huber radius override and mean degree") {
  auto s = testing::tiny_path();
  set_huber_radius(s, 0.3);
  for (const auto& e : s.edges) CHECK(e.radius == 0.3);
  for (const auto& l : s.links) CHECK(l.radius == 0.3);
  CHECK(mean_degree(s) == doctest::Approx(4.0 / 3.0));
  CHECK_THROWS_AS(set_huber_radius(s, 0.0), std::invalid_argument);
}

TEST_CASE("scenario files round-trip") {
  const auto s = apply_noise(testing::corner_network(4), GaussianNoise{0.04}, 2);
  const auto path = std::filesystem::temp_directory_path() / "rhloc_roundtrip.json";
  write_scenario(path, s, {{"note", "x"}});
  const auto r = read_scenario(path);
  CHECK(r.dim == s.dim);
  CHECK(r.truth == s.truth);
  CHECK(r.anchors == s.anchors);
  REQUIRE(r.edges.size() == s.edges.size());
  for (std::size_t k = 0; k < s.edges.size(); ++k) {
    CHECK(r.edges[k].range == s.edges[k].range);
    CHECK(r.edges[k].radius == s.edges[k].radius);
  }
  REQUIRE(r.links.size() == s.links.size());
  for (std::size_t k = 0; k < s.links.size(); ++k) CHECK(r.links[k].range == s.links[k].range);
  std::filesystem::remove(path);
}

TEST_CASE("scenario read errors") {
  const auto dir = std::filesystem::temp_directory_path();
  CHECK_THROWS_AS(read_scenario(dir / "rhloc_missing_file.json"), std::runtime_error);
  const auto bad = dir / "rhloc_bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK_THROWS(read_scenario(bad));
  std::ofstream(bad) << R"({"format": "something-else", "version": 1})";
  CHECK_THROWS(read_scenario(bad));
  std::filesystem::remove(bad);
  CHECK_THROWS_AS(positions_from_json(nlohmann::json::parse("[[1, 2, 3]]"), 2), std::invalid_argument);
}
