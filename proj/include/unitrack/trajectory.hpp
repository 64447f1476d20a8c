#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "unitrack/se2.hpp"

namespace unitrack {

/// p_d(t) = origin + (a cos(ht), b sin(ht)).
struct EllipseSpec {
  double a = 3.0;
  double b = 5.0;
  double h = 2.0 * std::numbers::pi / 5.0;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
};

/// Constant-input straight line; speed 0 gives a stationary reference.
struct LineSpec {
  double speed = 1.0;
  double heading = 0.0;
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
};

using TrajectorySpec = std::variant<EllipseSpec, LineSpec>;

using PoseFunction = std::function<Pose2d(double)>;
using InputFunction = std::function<ControlPair2d(double)>;

/// Reference pose and feedforward input satisfying dX_d/dt = X_d (B u_d)^.
class DesiredTrajectory {
 public:
  DesiredTrajectory(TrajectorySpec spec, PoseFunction pose, InputFunction input, std::optional<double> period)
      : spec_(std::move(spec)), pose_(std::move(pose)), input_(std::move(input)), period_(period) {}

  Pose2d pose_at(double t) const { return pose_(t); }
  ControlPair2d input_at(double t) const { return input_(t); }
  std::optional<double> period() const { return period_; }
  const TrajectorySpec& spec() const { return spec_; }

 private:
  TrajectorySpec spec_;
  PoseFunction pose_;
  InputFunction input_;
  std::optional<double> period_;
};

/// Ellipse with heading, speed and turn rate recovered from the path
/// (theta_d = atan2(pdot), v_d = |pdot|, omega_d = pdot x pddot / |pdot|^2).
/// Throws std::invalid_argument for a, b <= 0 or h == 0.
DesiredTrajectory ellipse_trajectory(double a, double b, double h, const Eigen::Vector2d& origin = {0, 0});

DesiredTrajectory line_trajectory(double speed, double heading, const Eigen::Vector2d& start = {0, 0});

DesiredTrajectory make_trajectory(const TrajectorySpec& spec);

/// Ellipse positions with the heading taken as theta_d = h t. Not a unicycle
/// trajectory unless a == b; only meaningful for excitation checks.
PoseFunction phase_heading_ellipse(double a, double b, double h, const Eigen::Vector2d& origin = {0, 0});

std::string describe(const TrajectorySpec& spec);

}  // namespace unitrack
