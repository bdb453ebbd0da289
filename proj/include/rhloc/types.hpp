#pragma once

#include <Eigen/Core>

namespace rhloc {

/// Largest ambient dimension supported. Points are stack-allocated up to this size.
inline constexpr int kMaxDim = 3;

/// A position or auxiliary vector in R^p, p <= kMaxDim.
template <typename Scalar>
using PointT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Point = PointT<double>;

/// Column-per-element position table, p x count.
using Positions = Eigen::MatrixXd;

}  // namespace rhloc
