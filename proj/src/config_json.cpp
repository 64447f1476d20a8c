#include "unitrack/config_json.hpp"

#include <set>

namespace unitrack {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object", {where});
  std::vector<std::string> unknown;
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) unknown.push_back(key);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown keys in " + where + ":";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg, unknown);
  }
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("'" + key + "' must be a number", {key});
  return j.get<double>();
}

std::vector<double> numbers(const json& j, const std::string& key, std::size_t n) {
  if (!j.is_array() || j.size() != n) {
    throw ConfigError("'" + key + "' must be an array of " + std::to_string(n) + " numbers", {key});
  }
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, key));
  return out;
}

json vec2(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }

void read_gains(const json& j, SimConfig& cfg) {
  if (j.contains("gains")) {
    const auto g = numbers(j.at("gains"), "gains", 2);
    cfg.gains = {g[0], g[1]};
  }
  if (j.contains("kanayama_gains")) {
    const auto g = numbers(j.at("kanayama_gains"), "kanayama_gains", 3);
    cfg.kanayama = {g[0], g[1], g[2]};
  }
}

InitialOffset read_offset(const json& j) {
  const auto o = numbers(j, "offset", 3);
  return InitialOffset{Eigen::Vector2d(o[0], o[1]), o[2]};
}

}  // namespace

json to_json(const TrajectorySpec& spec) {
  if (const auto* e = std::get_if<EllipseSpec>(&spec)) {
    return {{"type", "ellipse"}, {"a", e->a}, {"b", e->b}, {"h", e->h}, {"origin", vec2(e->origin)}};
  }
  const auto& l = std::get<LineSpec>(spec);
  return {{"type", "line"}, {"speed", l.speed}, {"heading", l.heading}, {"origin", vec2(l.start)}};
}

TrajectorySpec trajectory_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw ConfigError("trajectory needs a string 'type'", {"trajectory.type"});
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "ellipse") {
    check_keys(j, {"type", "a", "b", "h", "origin"}, "trajectory");
    EllipseSpec e;
    if (j.contains("a")) e.a = number(j.at("a"), "trajectory.a");
    if (j.contains("b")) e.b = number(j.at("b"), "trajectory.b");
    if (j.contains("h")) e.h = number(j.at("h"), "trajectory.h");
    if (j.contains("origin")) {
      const auto o = numbers(j.at("origin"), "trajectory.origin", 2);
      e.origin = {o[0], o[1]};
    }
    return e;
  }
  if (type == "line") {
    check_keys(j, {"type", "speed", "heading", "origin"}, "trajectory");
    LineSpec l;
    if (j.contains("speed")) l.speed = number(j.at("speed"), "trajectory.speed");
    if (j.contains("heading")) l.heading = number(j.at("heading"), "trajectory.heading");
    if (j.contains("origin")) {
      const auto o = numbers(j.at("origin"), "trajectory.origin", 2);
      l.start = {o[0], o[1]};
    }
    return l;
  }
  throw ConfigError("unknown trajectory type '" + type + "'", {"trajectory.type"});
}

json to_json(const SimConfig& cfg) {
  json j;
  j["trajectory"] = to_json(cfg.trajectory);
  j["controller"] = to_string(cfg.controller);
  j["gains"] = json::array({cfg.gains.k_omega, cfg.gains.k_v});
  j["kanayama_gains"] = json::array({cfg.kanayama.k_x, cfg.kanayama.k_y, cfg.kanayama.k_theta});
  if (const auto* off = std::get_if<InitialOffset>(&cfg.initial)) {
    j["initial"] = {{"offset", json::array({off->dp.x(), off->dp.y(), off->dtheta})}};
  } else {
    const auto& e = std::get<SpatialError2d>(cfg.initial);
    j["initial"] = {{"spatial_error", json::array({e.theta(), e.p().x(), e.p().y()})}};
  }
  j["dt"] = cfg.dt;
  j["t_end"] = cfg.t_end;
  j["seed"] = cfg.seed;
  return j;
}

SimConfig sim_config_from_json(const json& j) {
  check_keys(j, {"trajectory", "controller", "gains", "kanayama_gains", "initial", "dt", "t_end", "seed"}, "config");
  SimConfig cfg;
  if (j.contains("trajectory")) cfg.trajectory = trajectory_from_json(j.at("trajectory"));
  if (j.contains("controller")) {
    if (!j.at("controller").is_string()) throw ConfigError("'controller' must be a string", {"controller"});
    try {
      cfg.controller = controller_from_string(j.at("controller").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), {"controller"});
    }
  }
  read_gains(j, cfg);
  if (j.contains("initial")) {
    const json& init = j.at("initial");
    check_keys(init, {"offset", "spatial_error"}, "initial");
    if (init.size() != 1) throw ConfigError("'initial' needs exactly one of offset, spatial_error", {"initial"});
    if (init.contains("offset")) {
      cfg.initial = read_offset(init.at("offset"));
    } else {
      const auto e = numbers(init.at("spatial_error"), "initial.spatial_error", 3);
      cfg.initial = SpatialError2d{Pose2d(e[0], e[1], e[2])};
    }
  }
  if (j.contains("dt")) cfg.dt = number(j.at("dt"), "dt");
  if (j.contains("t_end")) cfg.t_end = number(j.at("t_end"), "t_end");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer", {"seed"});
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  return cfg;
}

CompareConfig compare_config_from_json(const json& j) {
  check_keys(j,
             {"trajectory", "controllers", "gains", "kanayama_gains", "offset", "dt", "t_end", "threshold", "decimate"},
             "compare config");
  CompareConfig cfg;
  if (j.contains("trajectory")) cfg.base.trajectory = trajectory_from_json(j.at("trajectory"));
  if (!j.contains("controllers") || !j.at("controllers").is_array()) {
    throw ConfigError("'controllers' must be an array of controller names", {"controllers"});
  }
  for (const auto& c : j.at("controllers")) {
    if (!c.is_string()) throw ConfigError("controller names must be strings", {"controllers"});
    try {
      cfg.controllers.push_back(controller_from_string(c.get<std::string>()));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), {"controllers"});
    }
  }
  if (cfg.controllers.empty()) throw ConfigError("'controllers' must not be empty", {"controllers"});
  read_gains(j, cfg.base);
  if (j.contains("offset")) cfg.base.initial = read_offset(j.at("offset"));
  if (j.contains("dt")) cfg.base.dt = number(j.at("dt"), "dt");
  if (j.contains("t_end")) cfg.base.t_end = number(j.at("t_end"), "t_end");
  if (j.contains("threshold")) cfg.threshold = number(j.at("threshold"), "threshold");
  if (j.contains("decimate")) {
    if (!j.at("decimate").is_number_integer() || j.at("decimate").get<int>() < 1) {
      throw ConfigError("'decimate' must be a positive integer", {"decimate"});
    }
    cfg.decimate = j.at("decimate").get<int>();
  }
  try {
    validate(cfg.base);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), {"dt", "t_end"});
  }
  return cfg;
}

json to_json(const CompareConfig& cfg) {
  json j;
  j["trajectory"] = to_json(cfg.base.trajectory);
  j["controllers"] = json::array();
  for (auto c : cfg.controllers) j["controllers"].push_back(to_string(c));
  j["gains"] = json::array({cfg.base.gains.k_omega, cfg.base.gains.k_v});
  j["kanayama_gains"] = json::array({cfg.base.kanayama.k_x, cfg.base.kanayama.k_y, cfg.base.kanayama.k_theta});
  const auto& off = std::get<InitialOffset>(cfg.base.initial);
  j["offset"] = json::array({off.dp.x(), off.dp.y(), off.dtheta});
  j["dt"] = cfg.base.dt;
  j["t_end"] = cfg.base.t_end;
  j["threshold"] = cfg.threshold;
  j["decimate"] = cfg.decimate;
  return j;
}

json to_json(const PEReport& r) {
  return {{"window_T", r.window_T},
          {"epsilon", r.epsilon},
          {"horizon", r.horizon},
          {"grid_points_per_window", r.grid_points_per_window},
          {"windows", r.windows},
          {"worst_window_start", r.worst_window_start},
          {"verdict", r.persistently_exciting() ? "PE on horizon" : "not PE on horizon"}};
}

json to_json(const BasinSummary& s) {
  json records = json::array();
  for (const auto& r : s.records) {
    records.push_back({{"theta_e", r.theta_e},
                       {"p_e", vec2(r.p_e)},
                       {"initial_lyapunov", r.initial_lyapunov},
                       {"final_lyapunov", r.final_lyapunov},
                       {"converged_at", r.converged_at ? json(*r.converged_at) : json(nullptr)}});
  }
  return {{"samples", s.samples},   {"converged", s.converged}, {"fraction", s.fraction}, {"seed", s.seed},
          {"threshold", s.threshold}, {"t_end", s.t_end},       {"records", records}};
}

json to_json(const LinCheckReport& r) {
  return {{"sample_times", r.sample_times},
          {"max_structure_residual", r.max_structure_residual},
          {"max_fd_residual", r.max_fd_residual},
          {"fitted_decay_rate", r.fitted_decay_rate},
          {"fit_r2", r.fit_r2},
          {"fit_window", json::array({r.fit_start, r.fit_end})},
          {"excitation", to_json(r.excitation)},
          {"gain_epsilon", r.gain_epsilon},
          {"verdict", r.persistently_exciting ? "PE" : "not PE"}};
}

}  // namespace unitrack
