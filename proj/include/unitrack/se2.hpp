#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace unitrack {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

/// se(2) element in R^3 coordinates, ordered (omega, vx, vy).
template <typename Scalar>
using Algebra = Eigen::Matrix<Scalar, 3, 1>;

/// Wrap an angle into [-pi, pi). Angles already in range are returned untouched.
template <typename Scalar>
[[nodiscard]] Scalar wrap_angle(Scalar theta) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  if (theta >= -pi && theta < pi) return theta;
  const Scalar two_pi = Scalar(2) * pi;
  Scalar r = std::fmod(theta + pi, two_pi);
  if (r < Scalar(0)) r += two_pi;
  r -= pi;
  if (r >= pi) r -= two_pi;
  return r;
}

/// (sin, cos) with the half-turn snapped to exact values, so the wrap point
/// -pi is an exact rotation by pi.
template <typename Scalar>
[[nodiscard]] std::pair<Scalar, Scalar> sin_cos(Scalar theta) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  if (theta == pi || theta == -pi) return {Scalar(0), Scalar(-1)};
  return {std::sin(theta), std::cos(theta)};
}

template <typename Scalar>
[[nodiscard]] Matrix2<Scalar> rot(Scalar theta) {
  const auto [s, c] = sin_cos(theta);
  Matrix2<Scalar> r;
  // clang-format off
  r << c, -s,
       s,  c;
  // clang-format on
  return r;
}

/// The generator 1^x of so(2).
template <typename Scalar>
[[nodiscard]] Matrix2<Scalar> unit_skew() {
  Matrix2<Scalar> j;
  j << Scalar(0), Scalar(-1), Scalar(1), Scalar(0);
  return j;
}

/// Frobenius-metric weight on se(2) coordinates: <x^, y^>_F = x^T S y.
template <typename Scalar>
[[nodiscard]] Matrix3<Scalar> frobenius_weight() {
  return Algebra<Scalar>(Scalar(2), Scalar(1), Scalar(1)).asDiagonal();
}

/// Actuated directions of the unicycle: u = (omega, v) -> (omega, v, 0).
template <typename Scalar>
[[nodiscard]] Eigen::Matrix<Scalar, 3, 2> actuation() {
  Eigen::Matrix<Scalar, 3, 2> b = Eigen::Matrix<Scalar, 3, 2>::Zero();
  b(0, 0) = Scalar(1);
  b(1, 1) = Scalar(1);
  return b;
}

template <typename Scalar>
[[nodiscard]] Matrix3<Scalar> wedge(const Algebra<Scalar>& x) {
  Matrix3<Scalar> m;
  // clang-format off
  m << Scalar(0), -x(0),     x(1),
       x(0),      Scalar(0), x(2),
       Scalar(0), Scalar(0), Scalar(0);
  // clang-format on
  return m;
}

/// Inverse of wedge. Throws std::invalid_argument if `m` is not in se(2)
/// within `tol` (zero bottom row, skew upper-left block).
template <typename Scalar>
[[nodiscard]] Algebra<Scalar> vee(const Matrix3<Scalar>& m, Scalar tol = Scalar(1e-9)) {
  using std::abs;
  const bool bottom_zero = m.row(2).cwiseAbs().maxCoeff() <= tol;
  const bool diag_zero = abs(m(0, 0)) <= tol && abs(m(1, 1)) <= tol;
  const bool skew = abs(m(0, 1) + m(1, 0)) <= tol;
  if (!(bottom_zero && diag_zero && skew)) {
    throw std::invalid_argument("vee: matrix is not an element of se(2)");
  }
  return Algebra<Scalar>(m(1, 0), m(0, 2), m(1, 2));
}

/// vee of the se(2) projection: skew part of the rotation block and the
/// translation column; everything else is discarded.
template <typename Scalar>
[[nodiscard]] Algebra<Scalar> se2_project(const Matrix3<Scalar>& m) {
  return Algebra<Scalar>((m(1, 0) - m(0, 1)) / Scalar(2), m(0, 2), m(1, 2));
}

template <typename Scalar>
[[nodiscard]] Scalar frobenius_weighted(const Algebra<Scalar>& x, const Algebra<Scalar>& y) {
  return Scalar(2) * x(0) * y(0) + x(1) * y(1) + x(2) * y(2);
}

/// Planar rigid transform stored as heading + position. The heading is kept
/// in [-pi, pi); the homogeneous matrix is produced on demand.
template <typename Scalar_>
class Pose {
 public:
  using Scalar = Scalar_;

  Pose() : theta_(Scalar(0)), p_(Vector2<Scalar>::Zero()) {}
  Pose(Scalar theta, const Vector2<Scalar>& p) : theta_(wrap_angle(theta)), p_(p) {}
  Pose(Scalar theta, Scalar x, Scalar y) : Pose(theta, Vector2<Scalar>(x, y)) {}

  static Pose Identity() { return Pose(); }

  /// Throws std::invalid_argument unless `m` is an SE(2) matrix within `tol`.
  static Pose FromMatrix(const Matrix3<Scalar>& m, Scalar tol = Scalar(1e-9)) {
    using std::abs;
    const Matrix2<Scalar> r = m.template topLeftCorner<2, 2>();
    const bool orthonormal =
        (r.transpose() * r - Matrix2<Scalar>::Identity()).cwiseAbs().maxCoeff() <= tol;
    const bool proper = abs(r.determinant() - Scalar(1)) <= tol;
    const bool bottom = abs(m(2, 0)) <= tol && abs(m(2, 1)) <= tol && abs(m(2, 2) - Scalar(1)) <= tol;
    if (!(orthonormal && proper && bottom)) {
      throw std::invalid_argument("Pose::FromMatrix: matrix is not an element of SE(2)");
    }
    using std::atan2;
    return Pose(atan2(m(1, 0), m(0, 0)), Vector2<Scalar>(m(0, 2), m(1, 2)));
  }

  Scalar theta() const { return theta_; }
  const Vector2<Scalar>& p() const { return p_; }

  Matrix2<Scalar> rotation() const { return rot(theta_); }

  Matrix3<Scalar> matrix() const {
    Matrix3<Scalar> m = Matrix3<Scalar>::Identity();
    m.template topLeftCorner<2, 2>() = rotation();
    m.template topRightCorner<2, 1>() = p_;
    return m;
  }

  Pose operator*(const Pose& other) const {
    return Pose(theta_ + other.theta_, p_ + rotation() * other.p_);
  }

  Pose inverse() const { return Pose(-theta_, -(rotation().transpose() * p_)); }

  /// R^3 coordinate matrix of Ad_g, i.e. Ad(g) x = vee(g x^ g^-1).
  Matrix3<Scalar> adjoint() const {
    Matrix3<Scalar> ad = Matrix3<Scalar>::Zero();
    ad(0, 0) = Scalar(1);
    ad.template block<2, 1>(1, 0) = -(unit_skew<Scalar>() * p_);
    ad.template block<2, 2>(1, 1) = rotation();
    return ad;
  }

  template <typename Other>
  Pose<Other> cast() const {
    return Pose<Other>(static_cast<Other>(theta_), p_.template cast<Other>());
  }

 private:
  Scalar theta_;
  Vector2<Scalar> p_;
};

using Pose2d = Pose<double>;

template <typename Scalar>
[[nodiscard]] Matrix3<Scalar> to_matrix(const Pose<Scalar>& g) {
  return g.matrix();
}

template <typename Scalar>
[[nodiscard]] Pose<Scalar> from_matrix(const Matrix3<Scalar>& m) {
  return Pose<Scalar>::FromMatrix(m);
}

template <typename Scalar>
[[nodiscard]] Pose<Scalar> compose(const Pose<Scalar>& g, const Pose<Scalar>& h) {
  return g * h;
}

template <typename Scalar>
[[nodiscard]] Pose<Scalar> inverse(const Pose<Scalar>& g) {
  return g.inverse();
}

template <typename Scalar>
[[nodiscard]] Matrix3<Scalar> adjoint_matrix(const Pose<Scalar>& g) {
  return g.adjoint();
}

namespace detail {

// sin(t)/t and (1 - cos(t))/t with series near zero.
template <typename Scalar>
std::pair<Scalar, Scalar> exp_coefficients(Scalar t) {
  using std::abs;
  if (abs(t) < Scalar(1e-6)) {
    const Scalar t2 = t * t;
    return {Scalar(1) - t2 / Scalar(6), t / Scalar(2) - t * t2 / Scalar(24)};
  }
  const auto [s, c] = sin_cos(t);
  return {s / t, (Scalar(1) - c) / t};
}

}  // namespace detail

template <typename Scalar>
[[nodiscard]] Pose<Scalar> exp_se2(const Algebra<Scalar>& x) {
  const auto [a, b] = detail::exp_coefficients(x(0));
  Matrix2<Scalar> v;
  v << a, -b, b, a;
  return Pose<Scalar>(x(0), v * x.template tail<2>());
}

/// Principal logarithm, theta in [-pi, pi). With `require_unique` the
/// half-turn (where the principal value is ambiguous) throws std::domain_error.
template <typename Scalar>
[[nodiscard]] Algebra<Scalar> log_se2(const Pose<Scalar>& g, bool require_unique = false) {
  using std::abs;
  using std::tan;
  const Scalar t = g.theta();
  if (require_unique && t == -std::numbers::pi_v<Scalar>) {
    throw std::domain_error("log_se2: rotation by pi has no unique principal logarithm");
  }
  const Scalar half = t / Scalar(2);
  Scalar diag;
  if (abs(t) < Scalar(1e-6)) {
    diag = Scalar(1) - t * t / Scalar(12);
  } else {
    diag = half / tan(half);
  }
  Matrix2<Scalar> v_inv;
  v_inv << diag, half, -half, diag;
  const Vector2<Scalar> v = v_inv * g.p();
  return Algebra<Scalar>(t, v(0), v(1));
}

/// Body-velocity input (omega, v) of the unicycle.
template <typename Scalar>
struct ControlPair {
  Scalar omega{0};
  Scalar v{0};

  /// B u = (omega, v, 0).
  Algebra<Scalar> embed() const { return Algebra<Scalar>(omega, v, Scalar(0)); }
  Vector2<Scalar> vector() const { return Vector2<Scalar>(omega, v); }

  static ControlPair FromVector(const Vector2<Scalar>& u) { return {u(0), u(1)}; }

  ControlPair operator+(const ControlPair& o) const { return {omega + o.omega, v + o.v}; }
  ControlPair operator-(const ControlPair& o) const { return {omega - o.omega, v - o.v}; }
  bool operator==(const ControlPair&) const = default;
};

using ControlPair2d = ControlPair<double>;

template <typename Scalar>
[[nodiscard]] Algebra<Scalar> embed(const ControlPair<Scalar>& u) {
  return u.embed();
}

}  // namespace unitrack
