#pragma once

#include "rhloc/huber.hpp"
#include "rhloc/netmodel.hpp"
#include "rhloc/types.hpp"

namespace rhloc {

/// z = (x, y, w) stored contiguously: all x by node, then y by edge index,
/// then w by link index (node-then-anchor order).
///
/// y_e is oriented from the lower to the higher endpoint of edge e, so the
/// edge residual is x_i - x_j - y_e with i < j.
class StackedVariables {
 public:
  StackedVariables() = default;
  StackedVariables(int dim, int nodes, int edges, int links)
      : dim_(dim), nodes_(nodes), edges_(edges), links_(links),
        data_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim) * (nodes + edges + links))) {}

  static StackedVariables zeros_like(const NetworkScenario& s) {
    return {s.dim, s.sensor_count(), static_cast<int>(s.edges.size()),
            static_cast<int>(s.links.size())};
  }

  int dim() const { return dim_; }
  int nodes() const { return nodes_; }
  int edges() const { return edges_; }
  int links() const { return links_; }

  Eigen::Map<Eigen::MatrixXd> x() { return {data_.data(), dim_, nodes_}; }
  Eigen::Map<Eigen::MatrixXd> y() { return {data_.data() + y_offset(), dim_, edges_}; }
  Eigen::Map<Eigen::MatrixXd> w() { return {data_.data() + w_offset(), dim_, links_}; }
  Eigen::Map<const Eigen::MatrixXd> x() const { return {data_.data(), dim_, nodes_}; }
  Eigen::Map<const Eigen::MatrixXd> y() const { return {data_.data() + y_offset(), dim_, edges_}; }
  Eigen::Map<const Eigen::MatrixXd> w() const { return {data_.data() + w_offset(), dim_, links_}; }

  Eigen::VectorXd& data() { return data_; }
  const Eigen::VectorXd& data() const { return data_; }

 private:
  Eigen::Index y_offset() const { return static_cast<Eigen::Index>(dim_) * nodes_; }
  Eigen::Index w_offset() const { return static_cast<Eigen::Index>(dim_) * (nodes_ + edges_); }

  int dim_ = 0;
  int nodes_ = 0;
  int edges_ = 0;
  int links_ = 0;
  Eigen::VectorXd data_;
};

/// Nonconvex cost g: sum of 1/2 loss(|x_i - x_j| - d_ij) over edges plus
/// 1/2 loss(|x_i - a_k| - r_ik) over anchor links.
double nonconvex_cost_g(const Positions& x, const NetworkScenario& scenario, LossFamily loss);

/// Convex underestimator f: same as g with every residual clipped by max(0, .).
double convex_cost_f(const Positions& x, const NetworkScenario& scenario, LossFamily loss);

/// Minimiser over |y| <= d of h(|x_i - x_j - y|): the projection of x_i - x_j.
template <typename DerivedA, typename DerivedB>
auto variational_inner_min(const Eigen::MatrixBase<DerivedA>& xi,
                           const Eigen::MatrixBase<DerivedB>& xj,
                           typename DerivedA::Scalar range) {
  return ball_projection((xi - xj).eval(), range);
}

/// Stacked point (x, y*, w*) with every auxiliary at its inner minimiser.
StackedVariables inner_minimized(const Positions& x, const NetworkScenario& scenario);

/// F(z) = sum_e 1/2 psi_R(x_i - x_j - y_e) + sum_l 1/2 psi_R(x_i - a_k - w_l).
double cost_F(const StackedVariables& z, const NetworkScenario& scenario);

/// Gradient of F, assembled with neighbour loops.
StackedVariables grad_F(const StackedVariables& z, const NetworkScenario& scenario);

/// Projection onto Z = {|y_e| <= d_e, |w_l| <= r_l}; x is untouched.
StackedVariables project_feasible(StackedVariables z, const NetworkScenario& scenario);

bool is_feasible(const StackedVariables& z, const NetworkScenario& scenario, double slack = 0.0);

/// Norm of the gradient mapping L * |z - P_Z(z - grad F(z) / L)|; zero exactly
/// at minimisers of F over Z.
double projected_gradient_residual(const StackedVariables& z, const NetworkScenario& scenario,
                                   double lipschitz);

/// Node i's share of F with edge terms split between both endpoints:
/// sum_{j in N_i} 1/4 psi(x_i - x_j - y_ij) + sum_{k in A_i} 1/2 psi(x_i - a_k - w_ik),
/// with y_ij = +/- y_e by orientation. Summed over all nodes this equals F.
double per_node_cost(int node, const StackedVariables& z, const NetworkScenario& scenario,
                     const IncidenceStructure& incidence);

}  // namespace rhloc
