#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "rhloc/cost.hpp"
#include "rhloc/trace.hpp"

namespace rhloc {

/// i.i.d. node activations with P(chi_t = i) = P_i > 0. Only the activation
/// order matters to the algorithm, so Poisson clocks reduce to categorical draws.
class ActivationSequence {
 public:
  /// Uniform probabilities 1/n.
  ActivationSequence(int nodes, std::uint64_t seed);
  /// Probabilities must be positive and sum to 1 (within 1e-9).
  ActivationSequence(std::vector<double> probabilities, std::uint64_t seed);

  int next();
  const std::vector<double>& probabilities() const { return probabilities_; }

 private:
  std::vector<double> probabilities_;
  std::mt19937_64 rng_;
  std::discrete_distribution<int> dist_;
};

struct AsyncState {
  struct EdgeSlot {
    int edge = 0;
    int neighbor = 0;
    int sign = 0;  // +1 when this node is the lower endpoint
    double range = 0.0;
    double radius = 0.0;
    Point y;  // own copy, residual x_self - x_neighbor - y
  };
  struct LinkSlot {
    int link = 0;
    Point anchor;
    double range = 0.0;
    double radius = 0.0;
    Point w;
  };
  struct Node {
    Point x;
    std::vector<EdgeSlot> edges;
    std::vector<LinkSlot> links;
    std::vector<Point> neighbor_cache;  // last broadcast received from each neighbour
  };

  int dim = 0;
  std::vector<Node> nodes;
  std::vector<int> edge_owner;  // endpoint that last minimised over each edge auxiliary
  std::int64_t t = 0;
  std::int64_t messages = 0;

  /// Global z; each edge auxiliary comes from its owner's copy.
  StackedVariables stacked(const NetworkScenario& scenario) const;
};

AsyncState async_init(const NetworkScenario& scenario, const Positions& init);

struct InnerOptions {
  double lipschitz = 0.0;
  double tol = 1e-10;
  int max_iters = 200;
};

struct NodeSolution {
  Point x;
  std::vector<Point> y;  // aligned with node.edges
  std::vector<Point> w;  // aligned with node.links
  double initial_cost = 0.0;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Node i's block of F with neighbour positions fixed:
/// sum_j 1/2 psi(x - x_j - y_j) + sum_k 1/2 psi(x - a_k - w_k).
double node_block_cost(const AsyncState::Node& node, const Point& x, const std::vector<Point>& y,
                       const std::vector<Point>& w);

/// Minimises the node block over x and the ball-constrained y, w with the
/// accelerated projected-gradient scheme of the synchronous solver. Starts
/// from the current x and the inner-minimised auxiliaries, and returns the
/// best iterate, so cost <= initial_cost always holds.
NodeSolution node_subproblem(const AsyncState::Node& node, const InnerOptions& options);

/// Activates `node`: solve its block, store the result, broadcast x to the
/// neighbours (|N_i| * p scalars). Every other block is untouched.
NodeSolution async_step(AsyncState& state, int node, const InnerOptions& options);

struct AsyncOptions {
  std::int64_t max_steps = 200000;
  double tol = 1e-9;
  double inner_tol = 1e-10;
  int inner_max_iters = 200;
  double lipschitz = 0.0;  // 0: computed from the scenario
  /// Stop before an activation whose broadcast would exceed this many scalars.
  std::optional<std::int64_t> message_budget;
  /// false: ignore the stagnation test and run until the budget or max_steps.
  bool stop_on_convergence = true;
};

/// Runs activations until the projected gradient residual drops below tol or
/// every node has been activated since its neighbours last moved and lowered F
/// by at most tol * F; also stops on the budget or max_steps.
SolveResult run_async(const NetworkScenario& scenario, const Positions& init,
                      ActivationSequence& activation, const AsyncOptions& options = {});

}  // namespace rhloc
