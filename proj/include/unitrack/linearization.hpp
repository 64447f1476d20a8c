#pragma once

#include <Eigen/Core>

#include <vector>

#include "unitrack/excitation.hpp"
#include "unitrack/trajectory.hpp"

namespace unitrack {

/// Explicit block form of the linearized error gain at X_d:
///   [ 1            p_d^T 1^x                          ]
///   [ -1^x p_d     -1^x p_d p_d^T 1^x + R_d e1 e1^T R_d^T ]
Eigen::Matrix3d error_gain_matrix(const Pose2d& xd);

/// Ad_{X_d} B B^T Ad_{X_d}^T, the Gram of the actuated directions in the
/// reference frame. Rank 2 at every instant.
Eigen::Matrix3d actuation_gram(const Pose2d& xd);

/// Analytic closed-loop Jacobian at the identity error, -M(X_d) S.
Eigen::Matrix3d closed_loop_jacobian(const Pose2d& xd);

/// Central-difference Jacobian of (theta_E, p_E) -> (dtheta_E/dt, dp_E/dt)
/// at the identity error, with the correction law closed around the error
/// dynamics and X_d frozen. Throws std::invalid_argument unless
/// step is in [1e-8, 1e-4].
Eigen::Matrix3d fd_closed_loop_jacobian(const Pose2d& xd, double step = 1e-6);

/// Least-squares line through log|x(t)| and the trajectory it was fit on.
struct DecayReport {
  double fitted_rate = 0.0;  // -slope of log|x|, 1/s
  double fit_r2 = 0.0;
  double fit_start = 0.0;
  double fit_end = 0.0;
  bool monotone = true;  // |x| non-increasing step to step
  double initial_norm = 0.0;
  double final_norm = 0.0;
  std::vector<double> times;
  std::vector<double> norms;
};

struct DecayOptions {
  double dt = 1e-4;
  double fit_fraction = 0.6;  // fit over the final fraction of the horizon
  int record_every = 10;
};

/// Integrates dx/dt = -A(t) x with fixed-step RK4 and fits the decay rate.
DecayReport integrate_decay(const MatrixFunction& a, const Eigen::VectorXd& x0, double t_end,
                            const DecayOptions& options = {});

/// Uniform exponential stability probe for dx/dt = -A(t) x. Before
/// simulating it checks that A is symmetric PSD on the sample grid
/// (tolerance 1e-9) and that every scanned window integral dominates
/// epsilon I. Throws std::invalid_argument on any failed precondition.
DecayReport stability_probe(const MatrixFunction& a, const Eigen::VectorXd& x0, double window, double epsilon,
                            double t_end, const DecayOptions& options = {});

struct LinCheckReport {
  std::vector<double> sample_times;
  double max_structure_residual = 0.0;  // |explicit gain - actuation Gram|
  double max_fd_residual = 0.0;         // |FD Jacobian - (-M S)|
  double fitted_decay_rate = 0.0;
  double fit_r2 = 0.0;
  double fit_start = 0.0;
  double fit_end = 0.0;
  PEReport excitation;       // of t -> B^T Ad^T S
  double gain_epsilon = 0.0;  // lambda_min of the windowed gain integral
  bool persistently_exciting = false;
};

struct LinCheckOptions {
  int samples = 10;
  double fd_step = 1e-6;
  double t_end = 40.0;
  double dt = 1e-3;
  double window = 0.0;  // 0: trajectory period, or 2 pi for aperiodic references
  int windows = 64;
  int nodes = 401;
};

/// Runs the linearization checks along a reference: structure identity,
/// FD-vs-analytic Jacobian, and the decay of the symmetrized LTV system
/// dnu/dt = -S^1/2 M(t) S^1/2 nu.
LinCheckReport lin_check(const DesiredTrajectory& traj, const LinCheckOptions& options = {});

}  // namespace unitrack
