#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "rhloc/types.hpp"

namespace rhloc {

/// Sensor-sensor range measurement. Always stored with i < j.
struct Edge {
  int i = 0;
  int j = 0;
  double range = 0.0;   // d_ij
  double radius = 0.0;  // Huber radius R_ij
};

/// Sensor-anchor range measurement.
struct AnchorLink {
  int node = 0;
  int anchor = 0;
  double range = 0.0;   // r_ik
  double radius = 0.0;  // Huber radius R_ik
};

/// Graph, anchors, true positions and the measured ranges of one network.
///
/// Edges are kept sorted by (i, j) and anchor links by (node, anchor); this
/// ordering is the layout of the auxiliary blocks of StackedVariables.
struct NetworkScenario {
  int dim = 2;
  Positions truth;    // p x n
  Positions anchors;  // p x m
  std::vector<Edge> edges;
  std::vector<AnchorLink> links;

  int sensor_count() const { return static_cast<int>(truth.cols()); }
  int anchor_count() const { return static_cast<int>(anchors.cols()); }
};

/// Sorts edges and links into canonical order and orients every edge i < j.
void normalize(NetworkScenario& scenario);

/// Throws std::invalid_argument naming the first broken invariant.
///
/// Checks: 1 <= dim <= kMaxDim, shapes, canonical ordering, no self loops or
/// duplicate edges, strictly positive finite ranges and radii, a connected
/// graph and at least one anchor link.
void validate(const NetworkScenario& scenario);

bool is_connected(int sensor_count, const std::vector<Edge>& edges);

/// Replaces every Huber radius with `radius`.
void set_huber_radius(NetworkScenario& scenario, double radius);

double mean_degree(const NetworkScenario& scenario);

struct GaussianNoise {
  double sigma = 0.0;
};

/// Regular noise everywhere except measurements touching a faulty node.
struct OutlierNoise {
  double sigma = 0.0;
  std::vector<int> faulty;
  double sigma_outlier = 0.0;
};

/// Faulty nodes report bias_factor times the true distance, without noise.
struct BiasNoise {
  double sigma = 0.0;
  std::vector<int> faulty;
  double bias_factor = 1.0;
};

using NoiseModel = std::variant<GaussianNoise, OutlierNoise, BiasNoise>;

/// Resamples every range from the true positions: |true distance + nu|.
/// Deterministic given `seed`. Radii are left untouched.
NetworkScenario apply_noise(const NetworkScenario& scenario, const NoiseModel& model,
                            std::uint64_t seed);

struct GeneratorConfig {
  int sensors = 10;
  int dim = 2;
  double area_side = 1.0;
  double comm_radius = 0.5;
  Positions anchors;  // p x m
  double huber_radius = 0.1;
  int max_attempts = 1000;
};

/// The 2^p corners of the cube [0, side]^p.
Positions corner_anchors(int dim, double side);

/// Uniform sensors in [0, side]^p, unit-disk edges and anchor links, ranges set
/// to the true distances. Resamples until the graph is connected and has an
/// anchor link; throws std::runtime_error("cannot produce connected scenario")
/// after `max_attempts`.
NetworkScenario generate_geometric_network(const GeneratorConfig& config, std::uint64_t seed);

/// Where an edge enters a node's neighbourhood.
struct EdgeRef {
  int edge = 0;
  int neighbor = 0;
  int sign = 0;  // arc-node incidence entry: +1 lower endpoint, -1 higher
};

/// Arc-node incidence in adjacency form. The dense |E| x n table is only
/// produced on request.
struct IncidenceStructure {
  int sensors = 0;
  std::vector<std::vector<EdgeRef>> neighbors;  // N_i with edge ids
  std::vector<std::vector<int>> node_links;     // link ids of A_i
  int max_degree = 0;
  int max_anchor_count = 0;

  int degree(int node) const { return static_cast<int>(neighbors[node].size()); }
  Eigen::MatrixXi dense_table(int edge_count) const;
};

IncidenceStructure build_incidence(const NetworkScenario& scenario);

/// L_F = 2 + 2*max_degree + max_anchor_count. Throws std::invalid_argument when
/// no node has an anchor link.
double lipschitz_constant(const IncidenceStructure& incidence);

}  // namespace rhloc
