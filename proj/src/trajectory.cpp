#include "unitrack/trajectory.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace unitrack {

DesiredTrajectory ellipse_trajectory(double a, double b, double h, const Eigen::Vector2d& origin) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("ellipse_trajectory: semi-axes must be positive");
  }
  if (h == 0.0 || !std::isfinite(h)) {
    throw std::invalid_argument("ellipse_trajectory: angular frequency must be finite and nonzero");
  }
  auto pose = [=](double t) {
    const double s = std::sin(h * t);
    const double c = std::cos(h * t);
    const Eigen::Vector2d pdot(-a * h * s, b * h * c);
    return Pose2d(std::atan2(pdot.y(), pdot.x()), origin + Eigen::Vector2d(a * c, b * s));
  };
  auto input = [=](double t) {
    const double s = std::sin(h * t);
    const double c = std::cos(h * t);
    const double speed_sq = h * h * (a * a * s * s + b * b * c * c);
    // pdot x pddot = a b h^3 for every t.
    return ControlPair2d{a * b * h * h * h / speed_sq, std::sqrt(speed_sq)};
  };
  return DesiredTrajectory(EllipseSpec{a, b, h, origin}, pose, input, 2.0 * std::numbers::pi / std::abs(h));
}

DesiredTrajectory line_trajectory(double speed, double heading, const Eigen::Vector2d& start) {
  const Eigen::Vector2d dir(std::cos(heading), std::sin(heading));
  auto pose = [=](double t) { return Pose2d(heading, start + speed * t * dir); };
  auto input = [=](double) { return ControlPair2d{0.0, speed}; };
  return DesiredTrajectory(LineSpec{speed, heading, start}, pose, input, std::nullopt);
}

DesiredTrajectory make_trajectory(const TrajectorySpec& spec) {
  return std::visit(
      [](const auto& s) -> DesiredTrajectory {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, EllipseSpec>) {
          return ellipse_trajectory(s.a, s.b, s.h, s.origin);
        } else {
          return line_trajectory(s.speed, s.heading, s.start);
        }
      },
      spec);
}

PoseFunction phase_heading_ellipse(double a, double b, double h, const Eigen::Vector2d& origin) {
  if (h == 0.0) throw std::invalid_argument("phase_heading_ellipse: h must be nonzero");
  return [=](double t) {
    return Pose2d(h * t, origin + Eigen::Vector2d(a * std::cos(h * t), b * std::sin(h * t)));
  };
}

std::string describe(const TrajectorySpec& spec) {
  std::ostringstream os;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, EllipseSpec>) {
          os << "ellipse(a=" << s.a << ", b=" << s.b << ", h=" << s.h << ", origin=(" << s.origin.x() << ", "
             << s.origin.y() << "))";
        } else {
          os << "line(speed=" << s.speed << ", heading=" << s.heading << ", start=(" << s.start.x() << ", "
             << s.start.y() << "))";
        }
      },
      spec);
  return os.str();
}

}  // namespace unitrack
