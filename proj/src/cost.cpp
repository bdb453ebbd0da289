#include "rhloc/cost.hpp"

namespace rhloc {

namespace {

template <bool Clip>
double discrepancy_cost(const Positions& x, const NetworkScenario& s, LossFamily loss) {
  double total = 0.0;
  for (const auto& e : s.edges) {
    double t = (x.col(e.i) - x.col(e.j)).norm() - e.range;
    if constexpr (Clip) t = hinge(t);
    total += 0.5 * loss(t, e.radius);
  }
  for (const auto& l : s.links) {
    double t = (x.col(l.node) - s.anchors.col(l.anchor)).norm() - l.range;
    if constexpr (Clip) t = hinge(t);
    total += 0.5 * loss(t, l.radius);
  }
  return total;
}

}  // namespace

double nonconvex_cost_g(const Positions& x, const NetworkScenario& scenario, LossFamily loss) {
  return discrepancy_cost<false>(x, scenario, loss);
}

double convex_cost_f(const Positions& x, const NetworkScenario& scenario, LossFamily loss) {
  return discrepancy_cost<true>(x, scenario, loss);
}

StackedVariables inner_minimized(const Positions& x, const NetworkScenario& s) {
  auto z = StackedVariables::zeros_like(s);
  z.x() = x;
  auto y = z.y();
  for (int e = 0; e < z.edges(); ++e) {
    const auto& edge = s.edges[e];
    y.col(e) = variational_inner_min(x.col(edge.i), x.col(edge.j), edge.range);
  }
  auto w = z.w();
  for (int l = 0; l < z.links(); ++l) {
    const auto& link = s.links[l];
    w.col(l) = variational_inner_min(x.col(link.node), s.anchors.col(link.anchor), link.range);
  }
  return z;
}

double cost_F(const StackedVariables& z, const NetworkScenario& s) {
  const auto x = z.x();
  const auto y = z.y();
  const auto w = z.w();
  double total = 0.0;
  for (int e = 0; e < z.edges(); ++e) {
    const auto& edge = s.edges[e];
    total += 0.5 * psi((x.col(edge.i) - x.col(edge.j) - y.col(e)).eval(), edge.radius);
  }
  for (int l = 0; l < z.links(); ++l) {
    const auto& link = s.links[l];
    total += 0.5 * psi((x.col(link.node) - s.anchors.col(link.anchor) - w.col(l)).eval(),
                       link.radius);
  }
  return total;
}

StackedVariables grad_F(const StackedVariables& z, const NetworkScenario& s) {
  auto g = StackedVariables::zeros_like(s);
  const auto x = z.x();
  const auto y = z.y();
  const auto w = z.w();
  auto gx = g.x();
  auto gy = g.y();
  auto gw = g.w();
  for (int e = 0; e < z.edges(); ++e) {
    const auto& edge = s.edges[e];
    const Point p = ball_projection((x.col(edge.i) - x.col(edge.j) - y.col(e)).eval(), edge.radius);
    gx.col(edge.i) += p;
    gx.col(edge.j) -= p;
    gy.col(e) = -p;
  }
  for (int l = 0; l < z.links(); ++l) {
    const auto& link = s.links[l];
    const Point p = ball_projection(
        (x.col(link.node) - s.anchors.col(link.anchor) - w.col(l)).eval(), link.radius);
    gx.col(link.node) += p;
    gw.col(l) = -p;
  }
  return g;
}

StackedVariables project_feasible(StackedVariables z, const NetworkScenario& s) {
  auto y = z.y();
  for (int e = 0; e < z.edges(); ++e) {
    y.col(e) = ball_projection(y.col(e).eval(), s.edges[e].range);
  }
  auto w = z.w();
  for (int l = 0; l < z.links(); ++l) {
    w.col(l) = ball_projection(w.col(l).eval(), s.links[l].range);
  }
  return z;
}

bool is_feasible(const StackedVariables& z, const NetworkScenario& s, double slack) {
  const auto y = z.y();
  for (int e = 0; e < z.edges(); ++e) {
    if (y.col(e).norm() > s.edges[e].range + slack) return false;
  }
  const auto w = z.w();
  for (int l = 0; l < z.links(); ++l) {
    if (w.col(l).norm() > s.links[l].range + slack) return false;
  }
  return true;
}

double projected_gradient_residual(const StackedVariables& z, const NetworkScenario& s,
                                   double lipschitz) {
  StackedVariables step = z;
  step.data() -= grad_F(z, s).data() / lipschitz;
  const auto projected = project_feasible(std::move(step), s);
  return lipschitz * (z.data() - projected.data()).norm();
}

double per_node_cost(int node, const StackedVariables& z, const NetworkScenario& s,
                     const IncidenceStructure& inc) {
  const auto x = z.x();
  const auto y = z.y();
  const auto w = z.w();
  double total = 0.0;
  for (const auto& ref : inc.neighbors[node]) {
    const auto& edge = s.edges[ref.edge];
    const Point y_own = static_cast<double>(ref.sign) * y.col(ref.edge);
    total += 0.25 * psi((x.col(node) - x.col(ref.neighbor) - y_own).eval(), edge.radius);
  }
  for (int l : inc.node_links[node]) {
    const auto& link = s.links[l];
    total += 0.5 * psi((x.col(node) - s.anchors.col(link.anchor) - w.col(l)).eval(), link.radius);
  }
  return total;
}

}  // namespace rhloc
