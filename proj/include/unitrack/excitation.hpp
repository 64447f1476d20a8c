#pragma once

#include <Eigen/Core>

#include <functional>

#include "unitrack/trajectory.hpp"

namespace unitrack {

using MatrixFunction = std::function<Eigen::MatrixXd(double)>;

/// Composite Simpson approximation of int_t^{t+T} A(tau) dtau on `n` nodes,
/// symmetrized. Throws std::invalid_argument for T <= 0, even n, or n < 3.
Eigen::MatrixXd window_integral(const MatrixFunction& a, double t, double window, int n = 401);

/// int_t^{t+T} F(tau)^T F(tau) dtau (Simpson, symmetrized).
Eigen::MatrixXd window_gram(const MatrixFunction& f, double t, double window, int n = 401);

/// Outcome of a finite-horizon excitation scan.
struct PEReport {
  double window_T = 0.0;
  double epsilon = 0.0;  // min over scanned windows of lambda_min(Gram), clamped at 0
  double horizon = 0.0;
  int grid_points_per_window = 0;
  int windows = 0;
  double worst_window_start = 0.0;

  bool persistently_exciting() const { return epsilon > 0.0; }
};

/// Scans `windows` uniformly spaced window starts over [0, horizon - T].
PEReport pe_epsilon(const MatrixFunction& f, double horizon, double window, int windows = 64, int n = 401);

/// Same scan applied to the integral of a symmetric PSD A(t) rather than a Gram.
PEReport pe_epsilon_integral(const MatrixFunction& a, double horizon, double window, int windows = 64, int n = 401);

/// One-period S-weighted Gram of the ellipse regressor with theta_d = h t:
/// diag(8 pi/h, (b^2 + 1) pi/h, (a^2 + 1) pi/h). Throws for h == 0.
Eigen::Matrix3d ellipse_pe_closed_form(double a, double b, double h);

/// t -> B^T Ad_{X_d(t)}^T S.
MatrixFunction controller_regressor(const DesiredTrajectory& traj);
MatrixFunction controller_regressor(const PoseFunction& pose);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& m);

}  // namespace unitrack
