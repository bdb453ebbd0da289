#include "rhloc/sync_solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace rhloc {

StackedVariables SyncState::stacked(const NetworkScenario& scenario) const {
  auto z = StackedVariables::zeros_like(scenario);
  auto x = z.x();
  auto y = z.y();
  auto w = z.w();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    x.col(static_cast<Eigen::Index>(i)) = node.x;
    for (const auto& slot : node.edges) {
      if (slot.sign > 0) y.col(slot.edge) = slot.y;
    }
    for (const auto& slot : node.links) w.col(slot.link) = slot.w;
  }
  return z;
}

SyncState sync_init(const NetworkScenario& s, const Positions& init) {
  if (init.rows() != s.dim || init.cols() != s.sensor_count()) {
    throw std::invalid_argument("initial positions have the wrong shape");
  }
  SyncState state;
  state.dim = s.dim;
  state.nodes.resize(s.sensor_count());
  for (int i = 0; i < s.sensor_count(); ++i) {
    state.nodes[i].x = init.col(i);
    state.nodes[i].x_prev = init.col(i);
  }
  for (int e = 0; e < static_cast<int>(s.edges.size()); ++e) {
    const auto& edge = s.edges[e];
    const Point y0 = ball_projection(Point(init.col(edge.i) - init.col(edge.j)), edge.range);
    const Point y0_mirror = ball_projection(Point(init.col(edge.j) - init.col(edge.i)), edge.range);
    state.nodes[edge.i].edges.push_back({e, edge.j, +1, edge.range, edge.radius, y0, y0});
    state.nodes[edge.j].edges.push_back(
        {e, edge.i, -1, edge.range, edge.radius, y0_mirror, y0_mirror});
  }
  for (int l = 0; l < static_cast<int>(s.links.size()); ++l) {
    const auto& link = s.links[l];
    const Point anchor = s.anchors.col(link.anchor);
    const Point w0 = ball_projection(Point(init.col(link.node) - anchor), link.range);
    state.nodes[link.node].links.push_back({l, anchor, link.range, link.radius, w0, w0});
  }
  return state;
}

Positions random_init(const NetworkScenario& s, std::uint64_t seed) {
  Eigen::VectorXd lo = s.truth.rowwise().minCoeff();
  Eigen::VectorXd hi = s.truth.rowwise().maxCoeff();
  if (s.anchor_count() > 0) {
    lo = lo.cwiseMin(s.anchors.rowwise().minCoeff());
    hi = hi.cwiseMax(s.anchors.rowwise().maxCoeff());
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Positions init(s.dim, s.sensor_count());
  for (int i = 0; i < s.sensor_count(); ++i) {
    for (int d = 0; d < s.dim; ++d) init(d, i) = lo(d) + (hi(d) - lo(d)) * unit(rng);
  }
  return init;
}

SyncState sync_init(const NetworkScenario& scenario, std::uint64_t seed) {
  return sync_init(scenario, random_init(scenario, seed));
}

void sync_node_update(SyncState::Node& node, const Point& xi, std::span<const Point> received,
                      double beta, double lipschitz) {
  Point grad = Point::Zero(xi.size());
  for (std::size_t k = 0; k < node.edges.size(); ++k) {
    auto& slot = node.edges[k];
    const Point upsilon = slot.y + beta * (slot.y - slot.y_prev);
    const Point p = ball_projection(Point(xi - received[k] - upsilon), slot.radius);
    slot.y_prev = slot.y;
    slot.y = ball_projection(Point(upsilon + p / lipschitz), slot.range);
    grad += p;
  }
  for (auto& slot : node.links) {
    const Point omega = slot.w + beta * (slot.w - slot.w_prev);
    const Point p = ball_projection(Point(xi - slot.anchor - omega), slot.radius);
    slot.w_prev = slot.w;
    slot.w = ball_projection(Point(omega + p / lipschitz), slot.range);
    grad += p;
  }
  node.x_prev = node.x;
  node.x = xi - grad / lipschitz;
}

void sync_step(SyncState& state, double lipschitz) {
  state.t += 1;
  const double beta = momentum(state.t);

  // Broadcast phase: every node publishes its extrapolated point.
  std::vector<Point> mailbox(state.nodes.size());
  for (std::size_t i = 0; i < state.nodes.size(); ++i) {
    const auto& node = state.nodes[i];
    mailbox[i] = node.x + beta * (node.x - node.x_prev);
    state.messages += static_cast<std::int64_t>(node.edges.size()) * state.dim;
  }

  // Update phase: each node reads only what its neighbours sent.
  std::vector<Point> received;
  for (std::size_t i = 0; i < state.nodes.size(); ++i) {
    auto& node = state.nodes[i];
    received.clear();
    for (const auto& slot : node.edges) received.push_back(mailbox[slot.neighbor]);
    sync_node_update(node, mailbox[i], received, beta, lipschitz);
  }
}

std::int64_t sync_round_messages(const NetworkScenario& scenario) {
  return 2 * static_cast<std::int64_t>(scenario.edges.size()) * scenario.dim;
}

SolveResult run_sync(const NetworkScenario& scenario, const Positions& init,
                     const SyncOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (options.window < 1) throw std::invalid_argument("window must be positive");
  const double lipschitz =
      options.lipschitz > 0.0 ? options.lipschitz : lipschitz_constant(build_incidence(scenario));

  SyncState state = sync_init(scenario, init);
  SolveResult result;
  std::vector<double> costs;

  auto record = [&]() {
    result.z = state.stacked(scenario);
    const double cost = cost_F(result.z, scenario);
    const double residual = projected_gradient_residual(result.z, scenario, lipschitz);
    costs.push_back(cost);
    result.trace.push_back({state.t, cost, residual, state.messages, -1});
    if (residual < options.tol) return true;
    if (state.t >= options.window) {
      // The whole window must be flat; accelerated iterates oscillate.
      const auto first = costs.end() - 1 - options.window;
      const auto [lo, hi] = std::minmax_element(first, costs.end());
      return *hi - *lo <= options.tol * std::abs(cost);
    }
    return false;
  };

  bool converged = record();
  while (!converged && state.t < options.max_iters) {
    sync_step(state, lipschitz);
    converged = record();
  }

  result.positions = result.z.x();
  result.iterations = state.t;
  result.messages = state.messages;
  result.converged = converged;
  return result;
}

}  // namespace rhloc
