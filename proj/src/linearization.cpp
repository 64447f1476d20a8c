#include "unitrack/linearization.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

#include "unitrack/controller.hpp"
#include "unitrack/group_errors.hpp"

namespace unitrack {

Eigen::Matrix3d error_gain_matrix(const Pose2d& xd) {
  const Eigen::Matrix2d j = unit_skew<double>();
  const Eigen::Vector2d& pd = xd.p();
  const Eigen::Vector2d heading = xd.rotation().col(0);
  Eigen::Matrix3d p;
  p(0, 0) = 1.0;
  p.block<1, 2>(0, 1) = pd.transpose() * j;
  p.block<2, 1>(1, 0) = -j * pd;
  p.block<2, 2>(1, 1) = -j * pd * pd.transpose() * j + heading * heading.transpose();
  return p;
}

Eigen::Matrix3d actuation_gram(const Pose2d& xd) {
  const Eigen::Matrix<double, 3, 2> ab = xd.adjoint() * actuation<double>();
  return ab * ab.transpose();
}

Eigen::Matrix3d closed_loop_jacobian(const Pose2d& xd) {
  return -actuation_gram(xd) * frobenius_weight<double>();
}

namespace {

// (dtheta_E/dt, dp_E/dt) read off dE/dt = E (Ad B u~)^.
Eigen::Vector3d error_velocity(const Eigen::Vector3d& mu, const Pose2d& xd) {
  const SpatialError2d e{Pose2d(mu(0), mu(1), mu(2))};
  const Eigen::Matrix3d edot = right_error_rate(e, xd, correction_matrix_form(e, xd));
  const auto [s, c] = sin_cos(e.theta());
  // dR/dt = thetadot [[-s, -c], [c, -s]]
  const double thetadot = c * edot(1, 0) - s * edot(0, 0);
  return Eigen::Vector3d(thetadot, edot(0, 2), edot(1, 2));
}

}  // namespace

Eigen::Matrix3d fd_closed_loop_jacobian(const Pose2d& xd, double step) {
  if (!(step >= 1e-8 && step <= 1e-4)) {
    throw std::invalid_argument("fd_closed_loop_jacobian: step must lie in [1e-8, 1e-4]");
  }
  Eigen::Matrix3d jac;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d d = step * Eigen::Vector3d::Unit(i);
    jac.col(i) = (error_velocity(d, xd) - error_velocity(-d, xd)) / (2.0 * step);
  }
  return jac;
}

DecayReport integrate_decay(const MatrixFunction& a, const Eigen::VectorXd& x0, double t_end,
                            const DecayOptions& options) {
  if (!(options.dt > 0.0) || !(t_end >= options.dt)) {
    throw std::invalid_argument("integrate_decay: need dt > 0 and t_end >= dt");
  }
  if (!(options.fit_fraction > 0.0 && options.fit_fraction <= 1.0)) {
    throw std::invalid_argument("integrate_decay: fit fraction must lie in (0, 1]");
  }
  const double dt = options.dt;
  const long steps = std::lround(t_end / dt);
  const double fit_start = t_end * (1.0 - options.fit_fraction);
  const int every = std::max(1, options.record_every);

  DecayReport report;
  report.initial_norm = x0.norm();
  report.fit_start = fit_start;
  report.fit_end = steps * dt;

  auto rhs = [&a](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd { return -(a(t) * x); };

  // running sums for the least-squares fit of log|x| against t
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
  auto accumulate = [&](double t, double norm) {
    if (t + 1e-12 < fit_start || !(norm > 0.0)) return;
    const double y = std::log(norm);
    n += 1;
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    syy += y * y;
  };

  Eigen::VectorXd x = x0;
  double norm = x.norm();
  report.times.push_back(0.0);
  report.norms.push_back(norm);
  accumulate(0.0, norm);
  for (long k = 0; k < steps; ++k) {
    const double t = k * dt;
    const Eigen::VectorXd k1 = rhs(t, x);
    const Eigen::VectorXd k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = rhs(t + dt, x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double next = x.norm();
    if (next > norm * (1.0 + 1e-12)) report.monotone = false;
    norm = next;
    const double tn = (k + 1) * dt;
    accumulate(tn, norm);
    if ((k + 1) % every == 0 || k + 1 == steps) {
      report.times.push_back(tn);
      report.norms.push_back(norm);
    }
  }
  report.final_norm = norm;

  const double var_t = n * stt - st * st;
  if (n >= 2 && var_t > 0.0) {
    const double slope = (n * sty - st * sy) / var_t;
    const double var_y = n * syy - sy * sy;
    report.fitted_rate = -slope;
    report.fit_r2 = var_y > 0.0 ? slope * slope * var_t / var_y : 1.0;
  }
  return report;
}

DecayReport stability_probe(const MatrixFunction& a, const Eigen::VectorXd& x0, double window, double epsilon,
                            double t_end, const DecayOptions& options) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("stability_probe: epsilon must be positive");
  if (!(window > 0.0) || !(t_end >= window)) {
    throw std::invalid_argument("stability_probe: need 0 < window <= t_end");
  }
  constexpr double tol = 1e-9;
  const int checks = 257;
  for (int i = 0; i < checks; ++i) {
    const double t = t_end * i / (checks - 1);
    const Eigen::MatrixXd m = a(t);
    if (m.rows() != m.cols() || m.rows() != x0.size()) {
      throw std::invalid_argument("stability_probe: A(t) must be square and match x0");
    }
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) {
      throw std::invalid_argument("stability_probe: A(t) is not symmetric");
    }
    if (min_eigenvalue(0.5 * (m + m.transpose())) < -tol) {
      throw std::invalid_argument("stability_probe: A(t) is not positive semi-definite");
    }
  }
  const PEReport pe = pe_epsilon_integral(a, t_end, window);
  if (pe.epsilon < epsilon) {
    throw std::invalid_argument("stability_probe: window integral of A does not dominate epsilon I");
  }
  return integrate_decay(a, x0, t_end, options);
}

LinCheckReport lin_check(const DesiredTrajectory& traj, const LinCheckOptions& options) {
  if (options.samples < 1) throw std::invalid_argument("lin_check: need at least one sample time");
  LinCheckReport report;
  const double span = traj.period().value_or(options.t_end);
  for (int i = 0; i < options.samples; ++i) {
    const double t = span * i / options.samples;
    const Pose2d xd = traj.pose_at(t);
    report.sample_times.push_back(t);
    report.max_structure_residual = std::max(
        report.max_structure_residual, (error_gain_matrix(xd) - actuation_gram(xd)).cwiseAbs().maxCoeff());
    report.max_fd_residual =
        std::max(report.max_fd_residual,
                 (fd_closed_loop_jacobian(xd, options.fd_step) - closed_loop_jacobian(xd)).cwiseAbs().maxCoeff());
  }

  const double window = options.window > 0.0 ? options.window : traj.period().value_or(2.0 * std::numbers::pi);
  const double horizon = std::max(options.t_end, window);
  report.excitation = pe_epsilon(controller_regressor(traj), horizon, window, options.windows, options.nodes);

  const Eigen::Vector3d root_s(std::sqrt(2.0), 1.0, 1.0);
  const MatrixFunction sym = [traj, root_s](double t) -> Eigen::MatrixXd {
    return root_s.asDiagonal() * actuation_gram(traj.pose_at(t)) * root_s.asDiagonal();
  };
  report.gain_epsilon = pe_epsilon_integral(sym, horizon, window, options.windows, options.nodes).epsilon;
  report.persistently_exciting = report.excitation.persistently_exciting() && report.gain_epsilon > 0.0;

  const Eigen::VectorXd x0 = Eigen::Vector3d::Ones().normalized();
  DecayOptions decay;
  decay.dt = options.dt;
  decay.record_every = 100;
  const DecayReport r = report.persistently_exciting
                            ? stability_probe(sym, x0, window, 0.99 * report.gain_epsilon, horizon, decay)
                            : integrate_decay(sym, x0, horizon, decay);
  report.fitted_decay_rate = r.fitted_rate;
  report.fit_r2 = r.fit_r2;
  report.fit_start = r.fit_start;
  report.fit_end = r.fit_end;
  return report;
}

}  // namespace unitrack
