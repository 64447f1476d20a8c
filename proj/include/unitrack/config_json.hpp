#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "unitrack/linearization.hpp"
#include "unitrack/simulation.hpp"

namespace unitrack {

/// Schema violation in a JSON configuration; `keys` names the offending entries.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& what, std::vector<std::string> keys)
      : std::invalid_argument(what), keys_(std::move(keys)) {}
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  std::vector<std::string> keys_;
};

nlohmann::json to_json(const TrajectorySpec& spec);
nlohmann::json to_json(const SimConfig& cfg);

TrajectorySpec trajectory_from_json(const nlohmann::json& j);
/// Missing keys take their defaults; unknown keys throw ConfigError.
SimConfig sim_config_from_json(const nlohmann::json& j);

/// Batch comparison settings read from a compare config file.
struct CompareConfig {
  SimConfig base;  // trajectory, gains, initial offset, dt, t_end
  std::vector<ControllerKind> controllers;
  double threshold = 1e-2;
  int decimate = 10;
};

/// Keys: trajectory, controllers, gains, kanayama_gains, offset, dt, t_end,
/// threshold, decimate. Throws ConfigError for unknown keys, bad types or an
/// empty controller list.
CompareConfig compare_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CompareConfig& cfg);

nlohmann::json to_json(const PEReport& report);
nlohmann::json to_json(const BasinSummary& summary);
nlohmann::json to_json(const LinCheckReport& report);

}  // namespace unitrack
