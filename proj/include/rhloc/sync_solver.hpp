#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rhloc/cost.hpp"
#include "rhloc/trace.hpp"

namespace rhloc {

/// Lockstep accelerated projected-gradient state, held node by node.
///
/// Each endpoint keeps its own copy of an edge auxiliary, oriented so that
/// its residual reads x_self - x_neighbor - y. The two copies of an edge
/// stay exact negatives of each other because the ball projection is odd.
struct SyncState {
  struct EdgeSlot {
    int edge = 0;
    int neighbor = 0;
    int sign = 0;  // +1 when this node is the lower endpoint
    double range = 0.0;
    double radius = 0.0;
    Point y, y_prev;
  };
  struct LinkSlot {
    int link = 0;
    Point anchor;
    double range = 0.0;
    double radius = 0.0;
    Point w, w_prev;
  };
  struct Node {
    Point x, x_prev;
    std::vector<EdgeSlot> edges;
    std::vector<LinkSlot> links;
  };

  int dim = 0;
  std::vector<Node> nodes;
  std::int64_t t = 0;
  std::int64_t messages = 0;

  /// Global z = (x, y, w) using the lower endpoint's copy of each edge.
  StackedVariables stacked(const NetworkScenario& scenario) const;
};

/// x^0 = x^{-1} = init; y^0 and w^0 are the projections of the initial residuals.
SyncState sync_init(const NetworkScenario& scenario, const Positions& init);

/// Random initial positions, uniform over the bounding box of anchors and
/// true positions. Deterministic given `seed`.
Positions random_init(const NetworkScenario& scenario, std::uint64_t seed);
SyncState sync_init(const NetworkScenario& scenario, std::uint64_t seed);

/// Extrapolation weight (t - 2) / (t + 1) used at round t >= 1.
inline double momentum(std::int64_t t) {
  return static_cast<double>(t - 2) / static_cast<double>(t + 1);
}

/// Node-local half of a round. Reads only the node's own blocks and the
/// extrapolated points `received` from its neighbours (aligned with
/// node.edges). Writes the new x, y, w of this node.
void sync_node_update(SyncState::Node& node, const Point& xi, std::span<const Point> received,
                      double beta, double lipschitz);

/// One lockstep round: every node extrapolates and broadcasts, then updates.
void sync_step(SyncState& state, double lipschitz);

struct SyncOptions {
  std::int64_t max_iters = 5000;
  double tol = 1e-9;
  int window = 10;
  /// Lipschitz constant; 0 means lipschitz_constant(build_incidence(scenario)).
  double lipschitz = 0.0;
};

/// Runs rounds until F varies by at most tol * F(t) over the last `window`
/// rounds, the projected gradient residual drops below tol, or max_iters is
/// reached.
SolveResult run_sync(const NetworkScenario& scenario, const Positions& init,
                     const SyncOptions& options = {});

/// Scalars delivered by one lockstep round: sum_i |N_i| * p.
std::int64_t sync_round_messages(const NetworkScenario& scenario);

}  // namespace rhloc
