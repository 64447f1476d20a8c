#pragma once

#include <cmath>
#include <stdexcept>

#include "unitrack/group_errors.hpp"
#include "unitrack/se2.hpp"

namespace unitrack {

/// Diagonal scaling of the correction. Unit gains give the unscaled
/// gradient law; any strictly positive pair keeps dL/dt <= 0.
template <typename Scalar>
struct Gains {
  Scalar k_omega{1};
  Scalar k_v{1};
};

/// Gains of the Kanayama et al. (1990) body-error tracking law.
template <typename Scalar>
struct KanayamaGains {
  Scalar k_x{2};
  Scalar k_y{8};
  Scalar k_theta{4};
};

using Gains2d = Gains<double>;
using KanayamaGains2d = KanayamaGains<double>;

/// Projected Lyapunov gradient: vee(P_se2(E^T E - E^T)) = (sin theta_E, R_E^T p_E).
template <typename Scalar>
[[nodiscard]] Algebra<Scalar> lyapunov_gradient(const SpatialError<Scalar>& e) {
  const Scalar s = sin_cos(e.theta()).first;
  const Vector2<Scalar> q = e.pose.rotation().transpose() * e.p();
  return Algebra<Scalar>(s, q(0), q(1));
}

/// Regressor B^T Ad_{X_d}^T S mapping the projected gradient to the input:
///   [ 2  p_d^T 1^x   ]
///   [ 0  e1^T R_d^T  ]
template <typename Scalar>
[[nodiscard]] Eigen::Matrix<Scalar, 2, 3> regressor(const Pose<Scalar>& xd) {
  return actuation<Scalar>().transpose() * xd.adjoint().transpose() * frobenius_weight<Scalar>();
}

/// Correction u~ assembled from the matrix expression
///   u~ = -B^T Ad_{X_d}^T S vee(P_se2(E^T E - E^T)).
template <typename Scalar>
[[nodiscard]] ControlPair<Scalar> correction_matrix_form(const SpatialError<Scalar>& e, const Pose<Scalar>& xd) {
  const Matrix3<Scalar> m = e.matrix();
  const Matrix3<Scalar> g = m.transpose() * m - m.transpose();
  const Vector2<Scalar> u = -(actuation<Scalar>().transpose() * xd.adjoint().transpose() *
                              frobenius_weight<Scalar>() * se2_project<Scalar>(g));
  return ControlPair<Scalar>::FromVector(u);
}

/// Same correction written out per component:
///   omega~ = -2 sin theta_E - p_d^T 1^x R_E^T p_E
///   v~     = -e1^T R_d^T R_E^T p_E
template <typename Scalar>
[[nodiscard]] ControlPair<Scalar> correction_component_form(Scalar theta_e, const Vector2<Scalar>& p_e,
                                                            const Pose<Scalar>& xd) {
  const Scalar s = sin_cos(wrap_angle(theta_e)).first;
  const Vector2<Scalar> q = rot(theta_e).transpose() * p_e;
  const Scalar omega = -Scalar(2) * s - xd.p().dot(unit_skew<Scalar>() * q);
  const Scalar v = -(xd.rotation().transpose() * q)(0);
  return {omega, v};
}

template <typename Scalar>
[[nodiscard]] ControlPair<Scalar> correction_component_form(const SpatialError<Scalar>& e, const Pose<Scalar>& xd) {
  return correction_component_form(e.theta(), e.p(), xd);
}

/// u = u_d + diag(k_omega, k_v) u~(E_R, X_d).
template <typename Scalar>
[[nodiscard]] ControlPair<Scalar> total_control(const Pose<Scalar>& x, const Pose<Scalar>& xd,
                                                const ControlPair<Scalar>& u_d, const Gains<Scalar>& gains = {}) {
  const ControlPair<Scalar> c = correction_component_form(right_error(x, xd), xd);
  return {u_d.omega + gains.k_omega * c.omega, u_d.v + gains.k_v * c.v};
}

/// dL/dt along the closed loop, -(A C)^T K (A C); K = I gives -|A C|^2.
template <typename Scalar>
[[nodiscard]] Scalar lyapunov_rate(const SpatialError<Scalar>& e, const Pose<Scalar>& xd,
                                   const Gains<Scalar>& gains = {}) {
  const Vector2<Scalar> ac = regressor(xd) * lyapunov_gradient(e);
  return -(gains.k_omega * ac(0) * ac(0) + gains.k_v * ac(1) * ac(1));
}

/// Position and heading of the reference seen from the vehicle,
/// (x_e, y_e, theta_e) = components of E_L^-1 = X^-1 X_d.
template <typename Scalar>
struct KanayamaError {
  Scalar x{0};
  Scalar y{0};
  Scalar theta{0};
};

template <typename Scalar>
[[nodiscard]] KanayamaError<Scalar> kanayama_error(const BodyError<Scalar>& e) {
  const Pose<Scalar> q = e.pose.inverse();
  return {q.p()(0), q.p()(1), q.theta()};
}

template <typename Scalar>
[[nodiscard]] ControlPair<Scalar> kanayama_control(const KanayamaError<Scalar>& q, const ControlPair<Scalar>& u_d,
                                                   const KanayamaGains<Scalar>& g = {}) {
  using std::cos;
  using std::sin;
  const Scalar v = u_d.v * cos(q.theta) + g.k_x * q.x;
  const Scalar omega = u_d.omega + u_d.v * (g.k_y * q.y + g.k_theta * sin(q.theta));
  return {omega, v};
}

template <typename Scalar>
[[nodiscard]] ControlPair<Scalar> kanayama_control(const BodyError<Scalar>& e, const ControlPair<Scalar>& u_d,
                                                   const KanayamaGains<Scalar>& g = {}) {
  return kanayama_control(kanayama_error(e), u_d, g);
}

}  // namespace unitrack
