#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "test_util.hpp"
#include "unitrack/controller.hpp"

namespace unitrack {
namespace {

using testing::hat;
using testing::homogeneous;
using testing::Sampler;
constexpr double kPi = std::numbers::pi;

SpatialError2d err(double theta, double x, double y) { return SpatialError2d{Pose2d(theta, x, y)}; }

double dist(const ControlPair2d& a, const ControlPair2d& b) {
  return std::max(std::abs(a.omega - b.omega), std::abs(a.v - b.v));
}

TEST(MatrixForm, Examples) {
  Sampler s(1);
  const Pose2d xd = s.pose();
  EXPECT_LT(dist(correction_matrix_form(SpatialError2d{}, xd), {0.0, 0.0}), 1e-15);

  const Pose2d centered(s.angle(), 0.0, 0.0);
  EXPECT_LT(dist(correction_matrix_form(err(kPi / 2.0, 0, 0), centered), {-2.0, 0.0}), 1e-15);

  EXPECT_LT(dist(correction_matrix_form(err(0.0, 1.0, 0.0), Pose2d::Identity()), {0.0, -1.0}), 1e-15);
  EXPECT_LT(dist(correction_component_form(err(0.0, 1.0, 0.0), Pose2d::Identity()), {0.0, -1.0}), 1e-15);
}

TEST(ComponentForm, Equilibria) {
  Sampler s(2);
  for (int i = 0; i < 100; ++i) {
    const Pose2d xd = s.pose();
    EXPECT_EQ(correction_component_form(0.0, Eigen::Vector2d::Zero().eval(), xd), (ControlPair2d{0.0, 0.0}));
    const ControlPair2d at_pi = correction_component_form(kPi, Eigen::Vector2d::Zero().eval(), xd);
    EXPECT_EQ(at_pi.omega, 0.0);
    EXPECT_EQ(at_pi.v, 0.0);
    const ControlPair2d at_minus_pi = correction_matrix_form(err(-kPi, 0, 0), xd);
    EXPECT_EQ(at_minus_pi.omega, 0.0);
    EXPECT_EQ(at_minus_pi.v, 0.0);
  }
}

TEST(ComponentForm, MatchesMatrixForm) {
  const Pose2d xd(0.0, 0.0, 2.0);
  EXPECT_LT(dist(correction_component_form(kPi / 4.0, Eigen::Vector2d(1.0, 0.0), xd),
                 correction_matrix_form(err(kPi / 4.0, 1.0, 0.0), xd)),
            1e-12);
  Sampler s(3);
  for (int i = 0; i < 10000; ++i) {
    const SpatialError2d e{s.pose()};
    const Pose2d x = s.pose();
    EXPECT_LT(dist(correction_component_form(e, x), correction_matrix_form(e, x)), 1e-12);
  }
}

TEST(MatrixForm, AgreesWithHandAssembledExpression) {
  Sampler s(4);
  Eigen::Matrix<double, 3, 2> b = Eigen::Matrix<double, 3, 2>::Zero();
  b(0, 0) = b(1, 1) = 1.0;
  const Eigen::Matrix3d weight = Eigen::Vector3d(2, 1, 1).asDiagonal();
  for (int i = 0; i < 1000; ++i) {
    const Pose2d ep = s.pose(), xd = s.pose();
    const Eigen::Matrix3d e = homogeneous(ep.theta(), ep.p().x(), ep.p().y());
    const Eigen::Matrix3d g = e.transpose() * e - e.transpose();
    const Eigen::Vector3d proj(0.5 * (g(1, 0) - g(0, 1)), g(0, 2), g(1, 2));
    const Eigen::Matrix3d md = homogeneous(xd.theta(), xd.p().x(), xd.p().y());
    Eigen::Matrix3d ad;
    for (int k = 0; k < 3; ++k) {
      const Eigen::Matrix3d c = md * hat(Eigen::Vector3d::Unit(k)) * md.inverse();
      ad.col(k) = Eigen::Vector3d(c(1, 0), c(0, 2), c(1, 2));
    }
    const Eigen::Vector2d expected = -b.transpose() * ad.transpose() * weight * proj;
    EXPECT_LT(dist(correction_matrix_form(SpatialError2d{ep}, xd), ControlPair2d::FromVector(expected)), 1e-12);
  }
}

TEST(Regressor, Examples) {
  Eigen::Matrix<double, 2, 3> at_identity;
  at_identity << 2, 0, 0, 0, 1, 0;
  EXPECT_EQ(regressor(Pose2d::Identity()), at_identity);
  const Eigen::Matrix<double, 2, 3> a = regressor(Pose2d(0.0, 1.5, -4.0));
  EXPECT_NEAR(a(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(a(0, 1), -4.0, 1e-15);
  EXPECT_NEAR(a(0, 2), -1.5, 1e-15);
}

TEST(Regressor, NormIdentity) {
  Sampler s(5);
  for (int i = 0; i < 1000; ++i) {
    const Pose2d xd = s.pose();
    EXPECT_NEAR(regressor(xd).squaredNorm(), 5.0 + xd.p().squaredNorm(), 1e-12);
  }
}

TEST(Gradient, Examples) {
  EXPECT_TRUE(lyapunov_gradient(SpatialError2d{}).isZero());
  EXPECT_EQ(lyapunov_gradient(err(kPi, 0.0, 0.0)), Eigen::Vector3d::Zero());
  EXPECT_LT((lyapunov_gradient(err(kPi / 2.0, 0.0, 1.0)) - Eigen::Vector3d(1, 1, 0)).norm(), 1e-15);
}

TEST(Gradient, MatchesProjectedMatrix) {
  Sampler s(6);
  for (int i = 0; i < 1000; ++i) {
    const Pose2d ep = s.pose();
    const Eigen::Matrix3d e = homogeneous(ep.theta(), ep.p().x(), ep.p().y());
    const Eigen::Matrix3d g = e.transpose() * e - e.transpose();
    const Eigen::Vector3d proj(0.5 * (g(1, 0) - g(0, 1)), g(0, 2), g(1, 2));
    EXPECT_LT((lyapunov_gradient(SpatialError2d{ep}) - proj).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Gradient, CorrectionIsMinusRegressorTimesGradient) {
  Sampler s(7);
  for (int i = 0; i < 1000; ++i) {
    const SpatialError2d e{s.pose()};
    const Pose2d xd = s.pose();
    const Eigen::Vector2d ac = regressor(xd) * lyapunov_gradient(e);
    EXPECT_LT((correction_component_form(e, xd).vector() + ac).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(TotalControl, Composition) {
  Sampler s(8);
  const Pose2d xd = s.pose();
  const ControlPair2d ud = s.control();
  EXPECT_LT(dist(total_control(xd, xd, ud), ud), 1e-12);
  for (int i = 0; i < 100; ++i) {
    const Pose2d x = s.pose(), d = s.pose();
    const ControlPair2d u_d = s.control();
    EXPECT_EQ(total_control(x, d, u_d, Gains2d{0.0, 0.0}), u_d);
    const ControlPair2d c = correction_matrix_form(right_error(x, d), d);
    EXPECT_LT(dist(total_control(x, d, u_d), u_d + c), 1e-12);
    const Gains2d k{0.5, 3.0};
    const ControlPair2d scaled = total_control(x, d, u_d, k);
    EXPECT_NEAR(scaled.omega, u_d.omega + 0.5 * c.omega, 1e-12);
    EXPECT_NEAR(scaled.v, u_d.v + 3.0 * c.v, 1e-12);
  }
}

TEST(LyapunovRate, NonPositiveAndZeroAtEquilibria) {
  Sampler s(9);
  for (int i = 0; i < 1000; ++i) {
    const Pose2d xd = s.pose();
    EXPECT_LE(lyapunov_rate(SpatialError2d{s.pose()}, xd), 0.0);
    EXPECT_EQ(lyapunov_rate(SpatialError2d{}, xd), 0.0);
    EXPECT_EQ(lyapunov_rate(err(kPi, 0.0, 0.0), xd), 0.0);
  }
}

TEST(LyapunovRate, MatchesClosedLoopDifference) {
  Sampler s(10);
  const double h = 1e-5;
  for (int i = 0; i < 500; ++i) {
    const Pose2d x = s.pose(), xd = s.pose();
    const ControlPair2d ud = s.control();
    const Gains2d k{s.uniform(0.1, 3.0), s.uniform(0.1, 3.0)};
    const ControlPair2d u = total_control(x, xd, ud, k);
    auto l_at = [&](double t) {
      const Eigen::Matrix3d mx = homogeneous(x.theta(), x.p().x(), x.p().y()) * (t * hat(u.embed())).exp();
      const Eigen::Matrix3d md = homogeneous(xd.theta(), xd.p().x(), xd.p().y()) * (t * hat(ud.embed())).exp();
      const Eigen::Matrix3d d = mx * md.inverse() - Eigen::Matrix3d::Identity();
      return 0.5 * (d.transpose() * d).trace();
    };
    const double fd = (l_at(h) - l_at(-h)) / (2.0 * h);
    const double analytic = lyapunov_rate(right_error(x, xd), xd, k);
    EXPECT_NEAR(fd, analytic, 1e-5 * std::max(1.0, std::abs(analytic)));
  }
}

TEST(Kanayama, ErrorMatchesReferenceFrameFormula) {
  Sampler s(11);
  for (int i = 0; i < 1000; ++i) {
    const Pose2d x = s.pose(), xd = s.pose();
    const KanayamaError<double> q = kanayama_error(left_error(xd, x));
    const double c = std::cos(x.theta()), sn = std::sin(x.theta());
    const Eigen::Vector2d d = xd.p() - x.p();
    EXPECT_NEAR(q.x, c * d.x() + sn * d.y(), 1e-12);
    EXPECT_NEAR(q.y, -sn * d.x() + c * d.y(), 1e-12);
    EXPECT_NEAR(std::remainder(q.theta - (xd.theta() - x.theta()), 2 * kPi), 0.0, 1e-12);
  }
}

TEST(Kanayama, Examples) {
  const ControlPair2d ud{0.4, 1.5};
  const KanayamaGains2d g;
  EXPECT_EQ(kanayama_control(KanayamaError<double>{}, ud), ud);
  const ControlPair2d u1 = kanayama_control(KanayamaError<double>{1.0, 0.0, 0.0}, ud);
  EXPECT_DOUBLE_EQ(u1.v, ud.v + g.k_x);
  EXPECT_DOUBLE_EQ(u1.omega, ud.omega);
  const ControlPair2d u2 = kanayama_control(KanayamaError<double>{0.0, 0.0, kPi / 2.0}, ud);
  EXPECT_NEAR(u2.v, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(u2.omega, ud.omega + ud.v * g.k_theta);
  const ControlPair2d u3 = kanayama_control(KanayamaError<double>{0.0, 0.5, 0.0}, ud);
  EXPECT_DOUBLE_EQ(u3.omega, ud.omega + ud.v * g.k_y * 0.5);
}

TEST(Kanayama, DefaultGainsPositive) {
  const KanayamaGains2d g;
  EXPECT_GT(g.k_x, 0.0);
  EXPECT_GT(g.k_y, 0.0);
  EXPECT_GT(g.k_theta, 0.0);
  const Gains2d k;
  EXPECT_EQ(k.k_omega, 1.0);
  EXPECT_EQ(k.k_v, 1.0);
}

}  // namespace
}  // namespace unitrack
