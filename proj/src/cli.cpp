#include "unitrack/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "unitrack/config_json.hpp"
#include "unitrack/excitation.hpp"
#include "unitrack/linearization.hpp"
#include "unitrack/simulation.hpp"

namespace unitrack {

using nlohmann::json;

namespace {

class UsageError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::vector<double> parse_list(const std::string& text, std::size_t n, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
    if (used != item.size() || !std::isfinite(v)) throw UsageError(flag + ": '" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.size() != n) throw UsageError(flag + " expects " + std::to_string(n) + " comma-separated values");
  return out;
}

struct TrajectoryFlags {
  std::optional<std::string> traj;
  std::optional<double> a, b, h, speed, heading;
  std::optional<std::string> origin;

  void add_to(CLI::App* cmd) {
    // --h is the ellipse frequency, so help is long-form only
    cmd->set_help_flag("--help", "Print this help message and exit");
    cmd->add_option("--traj", traj, "reference family")->check(CLI::IsMember({"ellipse", "line"}));
    cmd->add_option("--a", a, "ellipse semi-axis along x [m]");
    cmd->add_option("--b", b, "ellipse semi-axis along y [m]");
    cmd->add_option("--h", h, "ellipse angular frequency [rad/s]");
    cmd->add_option("--origin", origin, "ellipse centre or line start, x,y [m]");
    cmd->add_option("--speed", speed, "line speed [m/s]");
    cmd->add_option("--heading", heading, "line heading [rad]");
  }

  bool any() const { return traj || a || b || h || speed || heading || origin; }

  /// Applies the given flags on top of `base`.
  TrajectorySpec resolve(const TrajectorySpec& base) const {
    std::string kind = std::holds_alternative<EllipseSpec>(base) ? "ellipse" : "line";
    if (traj) kind = *traj;
    std::optional<Eigen::Vector2d> o;
    if (origin) {
      const auto v = parse_list(*origin, 2, "--origin");
      o = Eigen::Vector2d(v[0], v[1]);
    }
    if (kind == "ellipse") {
      if (speed || heading) throw UsageError("--speed/--heading apply to line trajectories only");
      EllipseSpec e = std::holds_alternative<EllipseSpec>(base) ? std::get<EllipseSpec>(base) : EllipseSpec{};
      if (a) e.a = *a;
      if (b) e.b = *b;
      if (h) e.h = *h;
      if (o) e.origin = *o;
      if (!(e.a > 0.0) || !(e.b > 0.0) || e.h == 0.0 || !std::isfinite(e.h)) {
        throw UsageError("ellipse needs a > 0, b > 0 and finite h != 0");
      }
      return e;
    }
    if (a || b || h) throw UsageError("--a/--b/--h apply to ellipse trajectories only");
    LineSpec l = std::holds_alternative<LineSpec>(base) ? std::get<LineSpec>(base) : LineSpec{};
    if (speed) l.speed = *speed;
    if (heading) l.heading = *heading;
    if (o) l.start = *o;
    return l;
  }
};

std::string strip_csv(const std::string& out) {
  const std::string ext = ".csv";
  if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
    return out.substr(0, out.size() - ext.size());
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw UsageError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---- simulate ----

struct SimulateFlags {
  TrajectoryFlags traj;
  std::optional<std::string> controller, gains, kanayama_gains, offset, config;
  std::optional<double> dt, t_end;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  SimConfig cfg;
  if (f.config) {
    const json j = read_json_file(*f.config);
    cfg = sim_config_from_json(j.contains("config") ? j.at("config") : j);
  }
  if (f.traj.any()) cfg.trajectory = f.traj.resolve(cfg.trajectory);
  if (f.controller) cfg.controller = controller_from_string(*f.controller);
  if (f.gains) {
    const auto g = parse_list(*f.gains, 2, "--gains");
    cfg.gains = {g[0], g[1]};
  }
  if (f.kanayama_gains) {
    const auto g = parse_list(*f.kanayama_gains, 3, "--kanayama-gains");
    cfg.kanayama = {g[0], g[1], g[2]};
  }
  if (f.offset) {
    const auto o = parse_list(*f.offset, 3, "--offset");
    cfg.initial = InitialOffset{Eigen::Vector2d(o[0], o[1]), o[2]};
  }
  if (f.dt) cfg.dt = *f.dt;
  if (f.t_end) cfg.t_end = *f.t_end;
  if (f.seed) cfg.seed = *f.seed;
  validate(cfg);
  make_trajectory(cfg.trajectory);

  const SimLog log = simulate(cfg);
  const std::string stem = strip_csv(f.out);
  const std::string csv_path = stem + ".csv";
  const std::string manifest_path = stem + ".manifest.json";
  std::ostringstream csv;
  write_csv(log, csv);
  write_file(csv_path, csv.str());

  json manifest;
  manifest["tool"] = "unitrack";
  manifest["version"] = kToolVersion;
  manifest["command"] = "simulate";
  manifest["config"] = to_json(cfg);
  manifest["seed"] = cfg.seed;
  manifest["outputs"] = {{"csv", csv_path}, {"manifest", manifest_path}};
  manifest["rows"] = log.rows.size();
  manifest["wall_clock_seconds"] = seconds_since(start);
  write_file(manifest_path, manifest.dump(2) + "\n");

  const SimRow& last = log.rows.back();
  out << "wrote " << csv_path << " (" << log.rows.size() << " rows), final lyapunov "
      << format_double(last.lyapunov) << ", position error " << format_double(position_error(last)) << "\n";
  return kExitOk;
}

// ---- pe-check ----

struct PeFlags {
  TrajectoryFlags traj;
  std::string convention = "flat";
  std::optional<double> window, horizon;
  int windows = 64;
  int nodes = 401;
  std::optional<std::string> out;
};

int cmd_pe_check(const PeFlags& f, std::ostream& out) {
  const TrajectorySpec spec = f.traj.resolve(EllipseSpec{});
  const DesiredTrajectory traj = make_trajectory(spec);
  const bool phase = f.convention == "phase";
  if (phase && !std::holds_alternative<EllipseSpec>(spec)) {
    throw UsageError("--convention phase applies to ellipse trajectories only");
  }
  const double window = f.window.value_or(traj.period().value_or(2.0 * std::numbers::pi));
  const double horizon = f.horizon.value_or(5.0 * window);
  if (!(window > 0.0) || !(horizon >= window)) throw UsageError("need --window > 0 and --horizon >= --window");
  if (f.nodes < 3 || f.nodes % 2 == 0) throw UsageError("--nodes must be odd and >= 3");
  if (f.windows < 1) throw UsageError("--windows must be positive");

  json report;
  report["trajectory"] = to_json(spec);
  report["convention"] = f.convention;
  if (phase) {
    const auto& e = std::get<EllipseSpec>(spec);
    const PoseFunction pose = phase_heading_ellipse(e.a, e.b, e.h, e.origin);
    const MatrixFunction regressor = controller_regressor(pose);
    report["pe"] = to_json(pe_epsilon(regressor, horizon, window, f.windows, f.nodes));
    const double period = 2.0 * std::numbers::pi / std::abs(e.h);
    const Eigen::MatrixXd quad = window_gram(regressor, 0.0, period, f.nodes);
    const Eigen::Matrix3d closed = ellipse_pe_closed_form(e.a, e.b, std::abs(e.h));
    report["closed_form_diagonal"] = {closed(0, 0), closed(1, 1), closed(2, 2)};
    report["quadrature_gram"] = json::array();
    for (int i = 0; i < 3; ++i) report["quadrature_gram"].push_back({quad(i, 0), quad(i, 1), quad(i, 2)});
    report["relative_residual"] = (quad - closed).norm() / closed.norm();
  } else {
    report["pe"] = to_json(pe_epsilon(controller_regressor(traj), horizon, window, f.windows, f.nodes));
  }
  const std::string text = report.dump(2) + "\n";
  if (f.out) write_file(*f.out, text);
  out << text;
  return kExitOk;
}

// ---- lin-check ----

struct LinFlags {
  TrajectoryFlags traj;
  int samples = 10;
  double dt = 1e-3;
  double t_end = 40.0;
  std::optional<std::string> out;
};

int cmd_lin_check(const LinFlags& f, std::ostream& out) {
  const TrajectorySpec spec = f.traj.resolve(EllipseSpec{});
  if (f.samples < 1) throw UsageError("--samples must be positive");
  if (!(f.dt > 0.0) || !(f.t_end >= f.dt)) throw UsageError("need --dt > 0 and --t-end >= --dt");
  LinCheckOptions opt;
  opt.samples = f.samples;
  opt.dt = f.dt;
  opt.t_end = f.t_end;
  json report = to_json(lin_check(make_trajectory(spec), opt));
  report["trajectory"] = to_json(spec);
  const std::string text = report.dump(2) + "\n";
  if (f.out) write_file(*f.out, text);
  out << text;
  return kExitOk;
}

// ---- compare ----

struct CompareFlags {
  std::string config;
  std::string out;
};

int cmd_compare(const CompareFlags& f, std::ostream& out) {
  const CompareConfig cc = compare_config_from_json(read_json_file(f.config));
  std::vector<SimConfig> cfgs;
  for (auto kind : cc.controllers) {
    SimConfig c = cc.base;
    c.controller = kind;
    cfgs.push_back(c);
  }
  const auto runs = compare_controllers(cfgs, cc.threshold);
  const std::string stem = strip_csv(f.out);
  for (const auto& run : runs) {
    std::ostringstream csv;
    write_csv(run.log, csv);
    write_file(stem + "_" + to_string(run.config.controller) + ".csv", csv.str());
  }
  std::ostringstream summary, panels;
  write_summary(runs, summary);
  write_panels(runs, panels, cc.decimate);
  write_file(stem + "_summary.csv", summary.str());
  write_file(stem + "_panels.csv", panels.str());
  out << summary.str();
  return kExitOk;
}

// ---- basin ----

struct BasinFlags {
  TrajectoryFlags traj;
  std::optional<std::string> gains;
  int samples = 100;
  std::uint64_t seed = 0;
  double dt = 1e-3;
  double t_end = 60.0;
  double threshold = 1e-6;
  std::optional<std::string> out;
};

int cmd_basin(const BasinFlags& f, std::ostream& out) {
  SimConfig cfg;
  cfg.trajectory = f.traj.resolve(EllipseSpec{});
  cfg.dt = f.dt;
  cfg.t_end = f.t_end;
  cfg.seed = f.seed;
  if (f.gains) {
    const auto g = parse_list(*f.gains, 2, "--gains");
    cfg.gains = {g[0], g[1]};
  }
  if (f.samples < 0) throw UsageError("--samples must be non-negative");
  const BasinSummary s = monte_carlo_basin(cfg, f.samples, f.seed, f.threshold);
  json report = to_json(s);
  report["config"] = to_json(cfg);
  const std::string text = report.dump(2) + "\n";
  if (f.out) write_file(*f.out, text);
  out << "converged " << s.converged << "/" << s.samples << " (fraction " << format_double(s.fraction) << ")\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial group-error tracking control for the kinematic unicycle", "unitrack"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  SimulateFlags sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "run one closed-loop simulation and write a CSV log");
  sim.traj.add_to(simulate_cmd);
  simulate_cmd->add_option("--controller", sim.controller)->check(CLI::IsMember({"spatial", "kanayama", "feedforward"}));
  simulate_cmd->add_option("--gains", sim.gains, "spatial gains k_omega,k_v");
  simulate_cmd->add_option("--kanayama-gains", sim.kanayama_gains, "k_x,k_y,k_theta");
  simulate_cmd->add_option("--offset", sim.offset, "initial offset dx,dy,dtheta");
  simulate_cmd->add_option("--dt", sim.dt, "step [s]");
  simulate_cmd->add_option("--t-end", sim.t_end, "horizon [s]");
  simulate_cmd->add_option("--seed", sim.seed);
  simulate_cmd->add_option("--config", sim.config, "config or manifest JSON; flags override it");
  simulate_cmd->add_option("--out", sim.out, "output CSV path")->required();

  PeFlags pe;
  auto* pe_cmd = app.add_subcommand("pe-check", "certify persistent excitation of the controller regressor");
  pe.traj.add_to(pe_cmd);
  pe_cmd->add_option("--convention", pe.convention, "ellipse heading: flat (path tangent) or phase (h t)")
      ->check(CLI::IsMember({"flat", "phase"}));
  pe_cmd->add_option("--window", pe.window, "window length T [s]");
  pe_cmd->add_option("--horizon", pe.horizon, "scanned horizon [s]");
  pe_cmd->add_option("--windows", pe.windows, "number of window starts");
  pe_cmd->add_option("--nodes", pe.nodes, "Simpson nodes per window (odd)");
  pe_cmd->add_option("--out", pe.out, "report JSON path");

  LinFlags lin;
  auto* lin_cmd = app.add_subcommand("lin-check", "check the linearized error dynamics");
  lin.traj.add_to(lin_cmd);
  lin_cmd->add_option("--samples", lin.samples, "sample times for the Jacobian checks");
  lin_cmd->add_option("--dt", lin.dt);
  lin_cmd->add_option("--t-end", lin.t_end);
  lin_cmd->add_option("--out", lin.out, "report JSON path");

  CompareFlags cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "run several controllers on one configuration");
  cmp_cmd->add_option("--config", cmp.config, "compare config JSON")->required();
  cmp_cmd->add_option("--out", cmp.out, "output prefix")->required();

  BasinFlags basin;
  auto* basin_cmd = app.add_subcommand("basin", "Monte-Carlo estimate of the basin of attraction");
  basin.traj.add_to(basin_cmd);
  basin_cmd->add_option("--gains", basin.gains);
  basin_cmd->add_option("--samples", basin.samples);
  basin_cmd->add_option("--seed", basin.seed);
  basin_cmd->add_option("--dt", basin.dt);
  basin_cmd->add_option("--t-end", basin.t_end);
  basin_cmd->add_option("--threshold", basin.threshold);
  basin_cmd->add_option("--out", basin.out, "summary JSON path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    const auto chosen = app.get_subcommands();
    err << (chosen.empty() ? app.help() : chosen.front()->help());
    return kExitUsage;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(sim, out);
    if (*pe_cmd) return cmd_pe_check(pe, out);
    if (*lin_cmd) return cmd_lin_check(lin, out);
    if (*cmp_cmd) return cmd_compare(cmp, out);
    if (*basin_cmd) return cmd_basin(basin, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SimulationError& e) {
    err << "simulation failed: " << e.what() << " (step " << e.step() << ")\n";
    return kExitRuntime;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace unitrack
