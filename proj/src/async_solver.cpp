#include "rhloc/async_solver.hpp"

#include "rhloc/sync_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace rhloc {

ActivationSequence::ActivationSequence(int nodes, std::uint64_t seed)
    : ActivationSequence(std::vector<double>(nodes > 0 ? nodes : 0, nodes > 0 ? 1.0 / nodes : 0.0),
                         seed) {}

ActivationSequence::ActivationSequence(std::vector<double> probabilities, std::uint64_t seed)
    : probabilities_(std::move(probabilities)), rng_(seed) {
  if (probabilities_.empty()) throw std::invalid_argument("activation needs at least one node");
  for (double p : probabilities_) {
    if (!(p > 0.0)) throw std::invalid_argument("activation probabilities must be positive");
  }
  const double total = std::accumulate(probabilities_.begin(), probabilities_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("activation probabilities must sum to 1");
  }
  dist_ = std::discrete_distribution<int>(probabilities_.begin(), probabilities_.end());
}

int ActivationSequence::next() { return dist_(rng_); }

StackedVariables AsyncState::stacked(const NetworkScenario& scenario) const {
  auto z = StackedVariables::zeros_like(scenario);
  auto x = z.x();
  auto y = z.y();
  auto w = z.w();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    x.col(static_cast<Eigen::Index>(i)) = node.x;
    for (const auto& slot : node.edges) {
      if (edge_owner[slot.edge] == static_cast<int>(i)) {
        y.col(slot.edge) = static_cast<double>(slot.sign) * slot.y;
      }
    }
    for (const auto& slot : node.links) w.col(slot.link) = slot.w;
  }
  return z;
}

AsyncState async_init(const NetworkScenario& s, const Positions& init) {
  if (init.rows() != s.dim || init.cols() != s.sensor_count()) {
    throw std::invalid_argument("initial positions have the wrong shape");
  }
  AsyncState state;
  state.dim = s.dim;
  state.nodes.resize(s.sensor_count());
  for (int i = 0; i < s.sensor_count(); ++i) state.nodes[i].x = init.col(i);
  state.edge_owner.resize(s.edges.size());
  for (int e = 0; e < static_cast<int>(s.edges.size()); ++e) {
    const auto& edge = s.edges[e];
    const Point y0 = ball_projection(Point(init.col(edge.i) - init.col(edge.j)), edge.range);
    const Point y0_mirror = ball_projection(Point(init.col(edge.j) - init.col(edge.i)), edge.range);
    state.nodes[edge.i].edges.push_back({e, edge.j, +1, edge.range, edge.radius, y0});
    state.nodes[edge.i].neighbor_cache.push_back(init.col(edge.j));
    state.nodes[edge.j].edges.push_back({e, edge.i, -1, edge.range, edge.radius, y0_mirror});
    state.nodes[edge.j].neighbor_cache.push_back(init.col(edge.i));
    state.edge_owner[e] = edge.i;
  }
  for (int l = 0; l < static_cast<int>(s.links.size()); ++l) {
    const auto& link = s.links[l];
    const Point anchor = s.anchors.col(link.anchor);
    const Point w0 = ball_projection(Point(init.col(link.node) - anchor), link.range);
    state.nodes[link.node].links.push_back({l, anchor, link.range, link.radius, w0});
  }
  return state;
}

double node_block_cost(const AsyncState::Node& node, const Point& x, const std::vector<Point>& y,
                       const std::vector<Point>& w) {
  double total = 0.0;
  for (std::size_t k = 0; k < node.edges.size(); ++k) {
    total += 0.5 * psi(Point(x - node.neighbor_cache[k] - y[k]), node.edges[k].radius);
  }
  for (std::size_t k = 0; k < node.links.size(); ++k) {
    const auto& slot = node.links[k];
    total += 0.5 * psi(Point(x - slot.anchor - w[k]), slot.radius);
  }
  return total;
}

namespace {

struct Block {
  Point x;
  std::vector<Point> y;
  std::vector<Point> w;
};

// Gradient of the node block; y and w parts are stored with the sign of
// -ball_projection, x part is the sum of the projections.
void block_gradient(const AsyncState::Node& node, const Block& at, Block& grad) {
  grad.x.setZero(at.x.size());
  for (std::size_t k = 0; k < node.edges.size(); ++k) {
    const Point p =
        ball_projection(Point(at.x - node.neighbor_cache[k] - at.y[k]), node.edges[k].radius);
    grad.x += p;
    grad.y[k] = -p;
  }
  for (std::size_t k = 0; k < node.links.size(); ++k) {
    const auto& slot = node.links[k];
    const Point p = ball_projection(Point(at.x - slot.anchor - at.w[k]), slot.radius);
    grad.x += p;
    grad.w[k] = -p;
  }
}

// Projected gradient step from `at` with step 1/L.
void projected_step(const AsyncState::Node& node, const Block& at, const Block& grad, double lipschitz,
                    Block& out) {
  out.x = at.x - grad.x / lipschitz;
  for (std::size_t k = 0; k < node.edges.size(); ++k) {
    out.y[k] = ball_projection(Point(at.y[k] - grad.y[k] / lipschitz), node.edges[k].range);
  }
  for (std::size_t k = 0; k < node.links.size(); ++k) {
    out.w[k] = ball_projection(Point(at.w[k] - grad.w[k] / lipschitz), node.links[k].range);
  }
}

double block_distance(const Block& a, const Block& b) {
  double sq = (a.x - b.x).squaredNorm();
  for (std::size_t k = 0; k < a.y.size(); ++k) sq += (a.y[k] - b.y[k]).squaredNorm();
  for (std::size_t k = 0; k < a.w.size(); ++k) sq += (a.w[k] - b.w[k]).squaredNorm();
  return std::sqrt(sq);
}

Block sized_like(const AsyncState::Node& node, int dim) {
  Block b;
  b.x = Point::Zero(dim);
  b.y.assign(node.edges.size(), Point::Zero(dim));
  b.w.assign(node.links.size(), Point::Zero(dim));
  return b;
}

}  // namespace

NodeSolution node_subproblem(const AsyncState::Node& node, const InnerOptions& options) {
  if (!(options.lipschitz > 0.0)) throw std::invalid_argument("inner Lipschitz constant must be positive");
  if (!(options.tol > 0.0)) throw std::invalid_argument("inner tolerance must be positive");
  const double lipschitz = options.lipschitz;
  const int dim = static_cast<int>(node.x.size());

  Block cur = sized_like(node, dim);
  cur.x = node.x;
  for (std::size_t k = 0; k < node.edges.size(); ++k) {
    cur.y[k] = ball_projection(Point(node.x - node.neighbor_cache[k]), node.edges[k].range);
  }
  for (std::size_t k = 0; k < node.links.size(); ++k) {
    cur.w[k] = ball_projection(Point(node.x - node.links[k].anchor), node.links[k].range);
  }

  NodeSolution best;
  best.x = cur.x;
  best.y = cur.y;
  best.w = cur.w;
  best.initial_cost = node_block_cost(node, cur.x, cur.y, cur.w);
  best.cost = best.initial_cost;

  Block prev = cur;
  Block ext = sized_like(node, dim);
  Block grad = sized_like(node, dim);
  Block probe = sized_like(node, dim);

  auto residual_at = [&](const Block& at) {
    block_gradient(node, at, grad);
    projected_step(node, at, grad, lipschitz, probe);
    return lipschitz * block_distance(at, probe);
  };

  if (residual_at(cur) < options.tol) {
    best.converged = true;
    return best;
  }

  for (int t = 1; t <= options.max_iters; ++t) {
    const double beta = momentum(t);
    ext.x = cur.x + beta * (cur.x - prev.x);
    for (std::size_t k = 0; k < cur.y.size(); ++k) ext.y[k] = cur.y[k] + beta * (cur.y[k] - prev.y[k]);
    for (std::size_t k = 0; k < cur.w.size(); ++k) ext.w[k] = cur.w[k] + beta * (cur.w[k] - prev.w[k]);
    block_gradient(node, ext, grad);
    std::swap(prev, cur);
    projected_step(node, ext, grad, lipschitz, cur);

    best.iterations = t;
    const double cost = node_block_cost(node, cur.x, cur.y, cur.w);
    if (cost < best.cost) {
      best.cost = cost;
      best.x = cur.x;
      best.y = cur.y;
      best.w = cur.w;
    }
    if (residual_at(cur) < options.tol) {
      best.converged = true;
      break;
    }
  }
  return best;
}

NodeSolution async_step(AsyncState& state, int i, const InnerOptions& options) {
  if (i < 0 || i >= static_cast<int>(state.nodes.size())) {
    throw std::invalid_argument("activated node is not a sensor");
  }
  auto& node = state.nodes[i];
  NodeSolution sol = node_subproblem(node, options);
  node.x = sol.x;
  for (std::size_t k = 0; k < node.edges.size(); ++k) {
    node.edges[k].y = sol.y[k];
    state.edge_owner[node.edges[k].edge] = i;
  }
  for (std::size_t k = 0; k < node.links.size(); ++k) node.links[k].w = sol.w[k];

  // Broadcast the new position to every neighbour.
  for (const auto& slot : node.edges) {
    auto& peer = state.nodes[slot.neighbor];
    for (std::size_t k = 0; k < peer.edges.size(); ++k) {
      if (peer.edges[k].edge == slot.edge) peer.neighbor_cache[k] = node.x;
    }
  }
  state.messages += static_cast<std::int64_t>(node.edges.size()) * state.dim;
  state.t += 1;
  return sol;
}

SolveResult run_async(const NetworkScenario& scenario, const Positions& init,
                      ActivationSequence& activation, const AsyncOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (static_cast<int>(activation.probabilities().size()) != scenario.sensor_count()) {
    throw std::invalid_argument("activation sequence does not match the sensor count");
  }
  const double lipschitz =
      options.lipschitz > 0.0 ? options.lipschitz : lipschitz_constant(build_incidence(scenario));
  const InnerOptions inner{lipschitz, options.inner_tol, options.inner_max_iters};

  AsyncState state = async_init(scenario, init);
  SolveResult result;
  // Decrease of F at each node's most recent activation; +inf until activated.
  std::vector<double> last_gain(state.nodes.size(), std::numeric_limits<double>::infinity());

  auto record = [&](int activated) {
    result.z = state.stacked(scenario);
    const double cost = cost_F(result.z, scenario);
    const double residual = projected_gradient_residual(result.z, scenario, lipschitz);
    if (activated >= 0) {
      const double gain = result.trace.back().cost - cost;
      last_gain[activated] = gain;
      // A moving node changes its neighbours' blocks, so their records are stale.
      if (gain > options.tol * std::abs(cost)) {
        for (const auto& slot : state.nodes[activated].edges) {
          last_gain[slot.neighbor] = std::numeric_limits<double>::infinity();
        }
      }
    }
    result.trace.push_back({state.t, cost, residual, state.messages, activated});
    if (!options.stop_on_convergence) return false;
    if (residual < options.tol) return true;
    const double worst = *std::max_element(last_gain.begin(), last_gain.end());
    return worst <= options.tol * std::abs(cost);
  };

  bool converged = record(-1);
  while (!converged && state.t < options.max_steps) {
    const int i = activation.next();
    if (options.message_budget) {
      const auto cost = static_cast<std::int64_t>(state.nodes[i].edges.size()) * state.dim;
      if (state.messages + cost > *options.message_budget) break;
    }
    async_step(state, i, inner);
    converged = record(i);
  }

  result.positions = result.z.x();
  result.iterations = state.t;
  result.messages = state.messages;
  result.converged = converged;
  return result;
}

}  // namespace rhloc
