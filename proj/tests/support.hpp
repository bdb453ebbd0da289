#pragma once

#include <cstdint>
#include <random>

#include "rhloc/netmodel.hpp"

namespace rhloc::testing {

// 10 sensors in the unit square with the four corner anchors.
inline NetworkScenario corner_network(std::uint64_t seed, double comm_radius = 0.5) {
  GeneratorConfig cfg;
  cfg.comm_radius = comm_radius;
  cfg.anchors = corner_anchors(2, 1.0);
  return generate_geometric_network(cfg, seed);
}

inline NetworkScenario noisy_corner_network(std::uint64_t seed, double sigma = 0.04) {
  return apply_noise(corner_network(seed), GaussianNoise{sigma}, seed + 1000);
}

// Three sensors on a path, one anchor link each end.
inline NetworkScenario tiny_path() {
  NetworkScenario s;
  s.dim = 2;
  s.truth.resize(2, 3);
  s.truth << 0.2, 0.5, 0.8, 0.3, 0.4, 0.3;
  s.anchors.resize(2, 2);
  s.anchors << 0.0, 1.0, 0.0, 0.0;
  s.edges = {{0, 1, 0.0, 0.1}, {1, 2, 0.0, 0.1}};
  s.links = {{0, 0, 0.0, 0.1}, {2, 1, 0.0, 0.1}};
  for (auto& e : s.edges) e.range = (s.truth.col(e.i) - s.truth.col(e.j)).norm();
  for (auto& l : s.links) l.range = (s.truth.col(l.node) - s.anchors.col(l.anchor)).norm();
  return s;
}

inline Positions uniform_positions(std::mt19937_64& rng, int dim, int count, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Positions x(dim, count);
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = u(rng);
  return x;
}

}  // namespace rhloc::testing
