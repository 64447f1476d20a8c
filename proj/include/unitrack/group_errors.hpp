#pragma once

#include <cmath>

#include "unitrack/se2.hpp"

namespace unitrack {

enum class ErrorKind { body_fixed, spatial };

/// Group error between an actual and a desired pose, tagged by formulation so
/// that code written for one error cannot be handed the other.
template <ErrorKind Kind, typename Scalar>
struct GroupError {
  static constexpr ErrorKind kind = Kind;
  Pose<Scalar> pose;

  Scalar theta() const { return pose.theta(); }
  const Vector2<Scalar>& p() const { return pose.p(); }
  Matrix3<Scalar> matrix() const { return pose.matrix(); }
};

/// E_L = X_d^-1 X: the transform from X_d to X in the frame of X_d.
template <typename Scalar>
using BodyError = GroupError<ErrorKind::body_fixed, Scalar>;
/// E_R = X X_d^-1: the transform from X_d to X in reference coordinates.
template <typename Scalar>
using SpatialError = GroupError<ErrorKind::spatial, Scalar>;

using BodyError2d = BodyError<double>;
using SpatialError2d = SpatialError<double>;

template <typename Scalar>
[[nodiscard]] BodyError<Scalar> left_error(const Pose<Scalar>& xd, const Pose<Scalar>& x) {
  return {xd.inverse() * x};
}

template <typename Scalar>
[[nodiscard]] SpatialError<Scalar> right_error(const Pose<Scalar>& x, const Pose<Scalar>& xd) {
  return {x * xd.inverse()};
}

/// dE_R/dt = E_R (Ad_{X_d} B u~)^. Zero whenever u~ = 0.
template <typename Scalar>
[[nodiscard]] Matrix3<Scalar> right_error_rate(const SpatialError<Scalar>& e, const Pose<Scalar>& xd,
                                               const ControlPair<Scalar>& u_tilde) {
  return e.matrix() * wedge<Scalar>(xd.adjoint() * u_tilde.embed());
}

/// dE_L/dt = -U_d E_L + E_L U.
template <typename Scalar>
[[nodiscard]] Matrix3<Scalar> left_error_rate(const BodyError<Scalar>& e, const ControlPair<Scalar>& u,
                                              const ControlPair<Scalar>& u_d) {
  const Matrix3<Scalar> m = e.matrix();
  return -wedge<Scalar>(u_d.embed()) * m + m * wedge<Scalar>(u.embed());
}

/// L(E) = 2(1 - cos theta_E) + |p_E|^2 / 2, i.e. half the squared Frobenius
/// distance of E from the identity.
template <typename Scalar>
[[nodiscard]] Scalar lyapunov(const SpatialError<Scalar>& e) {
  const Scalar c = sin_cos(e.theta()).second;
  return Scalar(2) * (Scalar(1) - c) + e.p().squaredNorm() / Scalar(2);
}

template <typename Scalar>
struct TrackingDistance {
  Scalar rotation{0};  // |R - R_d|_F
  Scalar position{0};  // |p - p_d|
};

template <typename Scalar>
[[nodiscard]] TrackingDistance<Scalar> tracking_distance(const Pose<Scalar>& x, const Pose<Scalar>& xd) {
  return {(x.rotation() - xd.rotation()).norm(), (x.p() - xd.p()).norm()};
}

}  // namespace unitrack
