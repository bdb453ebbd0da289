#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace rhloc {

/// Huber loss: t^2 inside [-R, R], 2R|t| - R^2 outside.
template <typename Scalar>
Scalar huber_loss(Scalar t, Scalar radius) {
  using std::abs;
  const Scalar a = abs(t);
  return a <= radius ? t * t : Scalar(2) * radius * a - radius * radius;
}

/// s(t) = max(0, t).
template <typename Scalar>
Scalar hinge(Scalar t) {
  return t > Scalar(0) ? t : Scalar(0);
}

/// Orthogonal projection onto the closed origin-centred ball of radius R.
/// The zero vector is returned unchanged.
template <typename Derived>
typename Derived::PlainObject ball_projection(const Eigen::MatrixBase<Derived>& u,
                                              typename Derived::Scalar radius) {
  const auto norm = u.norm();
  if (norm <= radius) return u;
  return u * (radius / norm);
}

/// Squared distance from u to the radius-R ball, (max(0, |u| - R))^2.
template <typename Derived>
typename Derived::Scalar sq_dist_ball(const Eigen::MatrixBase<Derived>& u,
                                      typename Derived::Scalar radius) {
  const auto gap = hinge(u.norm() - radius);
  return gap * gap;
}

/// Huber of a norm as a difference of smooth terms: |u|^2 - dist^2(u, B_R).
/// Equals huber_loss(|u|, R); its gradient is 2 * ball_projection(u, R).
template <typename Derived>
typename Derived::Scalar psi(const Eigen::MatrixBase<Derived>& u, typename Derived::Scalar radius) {
  return u.squaredNorm() - sq_dist_ball(u, radius);
}

/// Discrepancy loss applied to each range residual.
struct LossFamily {
  enum class Kind { quadratic, absolute, huber };

  Kind kind = Kind::huber;
  /// Huber only: overrides the per-measurement radii stored in the scenario.
  std::optional<double> radius;

  static LossFamily quadratic() { return {Kind::quadratic, std::nullopt}; }
  static LossFamily absolute() { return {Kind::absolute, std::nullopt}; }
  static LossFamily huber() { return {Kind::huber, std::nullopt}; }
  static LossFamily huber(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("Huber radius must be positive");
    return {Kind::huber, radius};
  }

  /// Loss of residual t; `term_radius` is the measurement's own Huber radius.
  template <typename Scalar>
  Scalar operator()(Scalar t, Scalar term_radius) const {
    using std::abs;
    switch (kind) {
      case Kind::quadratic:
        return t * t;
      case Kind::absolute:
        return abs(t);
      case Kind::huber:
        return huber_loss(t, radius ? Scalar(*radius) : term_radius);
    }
    return t * t;
  }
};

inline std::string_view to_string(LossFamily::Kind kind) {
  switch (kind) {
    case LossFamily::Kind::quadratic:
      return "quadratic";
    case LossFamily::Kind::absolute:
      return "absolute";
    case LossFamily::Kind::huber:
      return "huber";
  }
  return "unknown";
}

inline LossFamily::Kind loss_kind_from_string(std::string_view name) {
  if (name == "quadratic") return LossFamily::Kind::quadratic;
  if (name == "absolute") return LossFamily::Kind::absolute;
  if (name == "huber") return LossFamily::Kind::huber;
  throw std::invalid_argument("unknown loss family '" + std::string(name) + "'");
}

}  // namespace rhloc
