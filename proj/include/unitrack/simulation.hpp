#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "unitrack/controller.hpp"
#include "unitrack/group_errors.hpp"
#include "unitrack/trajectory.hpp"

namespace unitrack {

enum class ControllerKind { spatial, kanayama, feedforward };

std::string to_string(ControllerKind kind);
/// Throws std::invalid_argument for unknown names.
ControllerKind controller_from_string(const std::string& name);

/// p(0) = p_d(0) + dp, theta(0) = theta_d(0) + dtheta.
struct InitialOffset {
  Eigen::Vector2d dp = Eigen::Vector2d(3.0, -2.0);
  double dtheta = std::numbers::pi / 2.0;
};

/// Either a relative offset or an explicit spatial error, X(0) = E X_d(0).
using InitialCondition = std::variant<InitialOffset, SpatialError2d>;

struct SimConfig {
  TrajectorySpec trajectory = EllipseSpec{};
  ControllerKind controller = ControllerKind::spatial;
  Gains2d gains;
  KanayamaGains2d kanayama;
  InitialCondition initial = InitialOffset{};
  double dt = 1e-3;
  double t_end = 40.0;
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument unless dt > 0 and t_end >= dt.
void validate(const SimConfig& cfg);

struct SimRow {
  double t = 0.0;
  Pose2d pose;
  Pose2d desired;
  Pose2d left_error;   // X_d^-1 X
  Pose2d right_error;  // X X_d^-1
  double lyapunov = 0.0;
  ControlPair2d u;        // applied input
  ControlPair2d u_tilde;  // u - u_d
};

/// One row per step on the grid t_k = k dt, k = 0 .. round(t_end / dt).
struct SimLog {
  double dt = 0.0;
  std::vector<SimRow> rows;
};

class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

/// Return false to stop the run early.
using RowObserver = std::function<bool(const SimRow&)>;

/// Fixed-step RK4 on (theta, p) with the control law re-evaluated at every
/// stage and theta wrapped after every step. Throws SimulationError (with the
/// step index) if the state stops being finite.
void run_simulation(const SimConfig& cfg, const RowObserver& observer);
SimLog simulate(const SimConfig& cfg);

/// Initial pose implied by the configuration.
Pose2d initial_pose(const SimConfig& cfg, const DesiredTrajectory& traj);

/// The input `cfg.controller` applies at pose `x` and time `t`.
ControlPair2d control_input(const SimConfig& cfg, const DesiredTrajectory& traj, double t, const Pose2d& x);

double heading_error(const SimRow& row);
double position_error(const SimRow& row);

// Monte-Carlo estimate of the basin of attraction

struct BasinRecord {
  double theta_e = 0.0;
  Eigen::Vector2d p_e = Eigen::Vector2d::Zero();
  double initial_lyapunov = 0.0;
  double final_lyapunov = 0.0;
  std::optional<double> converged_at;
};

struct BasinSummary {
  int samples = 0;
  int converged = 0;
  double fraction = 0.0;
  std::uint64_t seed = 0;
  double threshold = 0.0;
  double t_end = 0.0;
  std::vector<BasinRecord> records;
};

/// Draws theta_E ~ U[-pi + 0.05, pi - 0.05], p_E ~ U[-5, 5]^2 and runs the
/// template configuration from X(0) = E X_d(0). Runs are evaluated
/// concurrently; the result depends only on the template and the seed.
/// Throws std::invalid_argument if the reference is not persistently exciting.
BasinSummary monte_carlo_basin(const SimConfig& tmpl, int samples, std::uint64_t seed, double threshold = 1e-6);

// Controller comparison

struct ControllerRun {
  SimConfig config;
  std::optional<double> heading_settle;   // time after which heading error stays below threshold
  std::optional<double> position_settle;  // same for position error
  double final_heading_error = 0.0;
  double final_position_error = 0.0;
  SimLog log;
};

/// Runs every configuration (concurrently). Throws std::invalid_argument if
/// the configurations disagree on trajectory or initial condition.
std::vector<ControllerRun> compare_controllers(const std::vector<SimConfig>& cfgs, double threshold = 1e-2);

/// Time after which `series` stays below `threshold`; nullopt if it ends above.
std::optional<double> settle_time(const SimLog& log, const std::function<double(const SimRow&)>& series,
                                  double threshold);

// Serialization

inline constexpr const char* kSimLogHeader =
    "t,theta,px,py,theta_d,pxd,pyd,eL_theta,eL_px,eL_py,eR_theta,eR_px,eR_py,lyap,omega,v,omega_tilde,v_tilde";

/// Shortest round-trip decimal representation.
std::string format_double(double value);

void write_csv(const SimLog& log, std::ostream& os);
/// Throws std::runtime_error on malformed input.
SimLog read_csv(std::istream& is);

/// Long-format plot data: panel,series,t,quantity,value. Panels: a (x/y
/// paths), b (Lyapunov value of spatial runs), c (heading error),
/// d (position error). Every `decimate`-th row is kept.
void write_panels(const std::vector<ControllerRun>& runs, std::ostream& os, int decimate = 10);

/// controller,heading_settle,position_settle,final_heading_error,final_position_error
void write_summary(const std::vector<ControllerRun>& runs, std::ostream& os);

}  // namespace unitrack
