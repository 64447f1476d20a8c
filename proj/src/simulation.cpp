#include "unitrack/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <thread>

#include "unitrack/excitation.hpp"

namespace unitrack {

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::spatial:
      return "spatial";
    case ControllerKind::kanayama:
      return "kanayama";
    case ControllerKind::feedforward:
      return "feedforward";
  }
  return "unknown";
}

ControllerKind controller_from_string(const std::string& name) {
  if (name == "spatial") return ControllerKind::spatial;
  if (name == "kanayama") return ControllerKind::kanayama;
  if (name == "feedforward") return ControllerKind::feedforward;
  throw std::invalid_argument("unknown controller '" + name + "'");
}

void validate(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw std::invalid_argument("dt must be positive");
  if (!(cfg.t_end >= cfg.dt) || !std::isfinite(cfg.t_end)) throw std::invalid_argument("t_end must be >= dt");
}

Pose2d initial_pose(const SimConfig& cfg, const DesiredTrajectory& traj) {
  const Pose2d xd0 = traj.pose_at(0.0);
  if (const auto* off = std::get_if<InitialOffset>(&cfg.initial)) {
    return Pose2d(xd0.theta() + off->dtheta, xd0.p() + off->dp);
  }
  return std::get<SpatialError2d>(cfg.initial).pose * xd0;
}

ControlPair2d control_input(const SimConfig& cfg, const DesiredTrajectory& traj, double t, const Pose2d& x) {
  const ControlPair2d u_d = traj.input_at(t);
  switch (cfg.controller) {
    case ControllerKind::spatial:
      return total_control(x, traj.pose_at(t), u_d, cfg.gains);
    case ControllerKind::kanayama:
      return kanayama_control(left_error(traj.pose_at(t), x), u_d, cfg.kanayama);
    case ControllerKind::feedforward:
      return u_d;
  }
  return u_d;
}

namespace {

SimRow make_row(const SimConfig& cfg, const DesiredTrajectory& traj, double t, const Pose2d& x) {
  SimRow row;
  row.t = t;
  row.pose = x;
  row.desired = traj.pose_at(t);
  row.left_error = left_error(row.desired, x).pose;
  const SpatialError2d er = right_error(x, row.desired);
  row.right_error = er.pose;
  row.lyapunov = lyapunov(er);
  row.u = control_input(cfg, traj, t, x);
  row.u_tilde = row.u - traj.input_at(t);
  return row;
}

}  // namespace

void run_simulation(const SimConfig& cfg, const RowObserver& observer) {
  validate(cfg);
  const DesiredTrajectory traj = make_trajectory(cfg.trajectory);
  const double dt = cfg.dt;
  const long steps = std::lround(cfg.t_end / dt);

  // unicycle vector field with the control law closed at (t, state)
  auto field = [&](double t, const Eigen::Vector3d& s) -> Eigen::Vector3d {
    const ControlPair2d u = control_input(cfg, traj, t, Pose2d(s(0), s(1), s(2)));
    return Eigen::Vector3d(u.omega, u.v * std::cos(s(0)), u.v * std::sin(s(0)));
  };

  const Pose2d x0 = initial_pose(cfg, traj);
  Eigen::Vector3d state(x0.theta(), x0.p().x(), x0.p().y());
  if (!state.allFinite()) throw SimulationError("non-finite initial state", 0);

  if (!observer(make_row(cfg, traj, 0.0, x0))) return;
  for (long k = 0; k < steps; ++k) {
    const double t = k * dt;
    const Eigen::Vector3d k1 = field(t, state);
    const Eigen::Vector3d k2 = field(t + 0.5 * dt, state + 0.5 * dt * k1);
    const Eigen::Vector3d k3 = field(t + 0.5 * dt, state + 0.5 * dt * k2);
    const Eigen::Vector3d k4 = field(t + dt, state + dt * k3);
    state += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!state.allFinite()) {
      throw SimulationError("state became non-finite at step " + std::to_string(k + 1), k + 1);
    }
    state(0) = wrap_angle(state(0));
    const Pose2d x(state(0), state(1), state(2));
    if (!observer(make_row(cfg, traj, (k + 1) * dt, x))) return;
  }
}

SimLog simulate(const SimConfig& cfg) {
  validate(cfg);
  SimLog log;
  log.dt = cfg.dt;
  log.rows.reserve(static_cast<std::size_t>(std::lround(cfg.t_end / cfg.dt)) + 1);
  run_simulation(cfg, [&log](const SimRow& row) {
    log.rows.push_back(row);
    return true;
  });
  return log;
}

double heading_error(const SimRow& row) { return std::abs(wrap_angle(row.pose.theta() - row.desired.theta())); }

double position_error(const SimRow& row) { return (row.pose.p() - row.desired.p()).norm(); }

namespace {

// Evaluates job(i) for i in [0, n) on a small thread pool; each index writes
// only its own slot, so the outcome does not depend on scheduling.
template <typename Job>
void parallel_for(int n, Job job) {
  const int workers = std::clamp<int>(static_cast<int>(std::thread::hardware_concurrency()), 1, std::max(n, 1));
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      for (int i = w; i < n; i += workers) job(i);
    }));
  }
  for (auto& f : futures) f.get();
}

bool same_trajectory(const TrajectorySpec& a, const TrajectorySpec& b) {
  if (a.index() != b.index()) return false;
  if (const auto* ea = std::get_if<EllipseSpec>(&a)) {
    const auto& eb = std::get<EllipseSpec>(b);
    return ea->a == eb.a && ea->b == eb.b && ea->h == eb.h && ea->origin == eb.origin;
  }
  const auto& la = std::get<LineSpec>(a);
  const auto& lb = std::get<LineSpec>(b);
  return la.speed == lb.speed && la.heading == lb.heading && la.start == lb.start;
}

bool same_initial(const InitialCondition& a, const InitialCondition& b) {
  if (a.index() != b.index()) return false;
  if (const auto* oa = std::get_if<InitialOffset>(&a)) {
    const auto& ob = std::get<InitialOffset>(b);
    return oa->dp == ob.dp && oa->dtheta == ob.dtheta;
  }
  const auto& ea = std::get<SpatialError2d>(a);
  const auto& eb = std::get<SpatialError2d>(b);
  return ea.theta() == eb.theta() && ea.p() == eb.p();
}

}  // namespace

BasinSummary monte_carlo_basin(const SimConfig& tmpl, int samples, std::uint64_t seed, double threshold) {
  validate(tmpl);
  if (samples < 0) throw std::invalid_argument("sample count must be non-negative");
  BasinSummary summary;
  summary.seed = seed;
  summary.threshold = threshold;
  summary.t_end = tmpl.t_end;
  if (samples == 0) return summary;

  const DesiredTrajectory traj = make_trajectory(tmpl.trajectory);
  const auto period = traj.period();
  if (!period) throw std::invalid_argument("basin estimation needs a periodic, persistently exciting reference");
  const PEReport pe = pe_epsilon(controller_regressor(traj), 5.0 * *period, *period);
  if (!pe.persistently_exciting()) {
    throw std::invalid_argument("basin estimation needs a persistently exciting reference");
  }

  constexpr double margin = 0.05;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi + margin, std::numbers::pi - margin);
  std::uniform_real_distribution<double> offset(-5.0, 5.0);
  summary.records.resize(samples);
  for (auto& rec : summary.records) {
    rec.theta_e = angle(rng);
    const double x = offset(rng);
    const double y = offset(rng);
    rec.p_e = Eigen::Vector2d(x, y);
  }

  parallel_for(samples, [&](int i) {
    BasinRecord& rec = summary.records[i];
    SimConfig cfg = tmpl;
    cfg.initial = SpatialError2d{Pose2d(rec.theta_e, rec.p_e)};
    bool first = true;
    run_simulation(cfg, [&](const SimRow& row) {
      if (first) {
        rec.initial_lyapunov = row.lyapunov;
        first = false;
      }
      rec.final_lyapunov = row.lyapunov;
      if (row.lyapunov < threshold) {
        rec.converged_at = row.t;
        return false;
      }
      return true;
    });
  });

  summary.samples = samples;
  summary.converged = static_cast<int>(
      std::count_if(summary.records.begin(), summary.records.end(), [](const auto& r) { return r.converged_at; }));
  summary.fraction = static_cast<double>(summary.converged) / samples;
  return summary;
}

std::optional<double> settle_time(const SimLog& log, const std::function<double(const SimRow&)>& series,
                                  double threshold) {
  if (log.rows.empty()) return std::nullopt;
  for (std::size_t i = log.rows.size(); i-- > 0;) {
    if (series(log.rows[i]) >= threshold) {
      if (i + 1 == log.rows.size()) return std::nullopt;
      return log.rows[i + 1].t;
    }
  }
  return log.rows.front().t;
}

std::vector<ControllerRun> compare_controllers(const std::vector<SimConfig>& cfgs, double threshold) {
  for (const auto& cfg : cfgs) {
    validate(cfg);
    if (!same_trajectory(cfg.trajectory, cfgs.front().trajectory) || !same_initial(cfg.initial, cfgs.front().initial)) {
      throw std::invalid_argument("compared configurations must share trajectory and initial condition");
    }
  }
  std::vector<ControllerRun> runs(cfgs.size());
  parallel_for(static_cast<int>(cfgs.size()), [&](int i) {
    ControllerRun& run = runs[i];
    run.config = cfgs[i];
    run.log = simulate(cfgs[i]);
    run.heading_settle = settle_time(run.log, heading_error, threshold);
    run.position_settle = settle_time(run.log, position_error, threshold);
    run.final_heading_error = heading_error(run.log.rows.back());
    run.final_position_error = position_error(run.log.rows.back());
  });
  return runs;
}

}  // namespace unitrack
