#pragma once

#include <string>
#include <vector>

#include "dualtri/result_table.hpp"
#include "dualtri/scenario_config.hpp"

namespace dualtri {

struct ScenarioInfo {
  std::string name;
  std::string description;
};

const std::vector<ScenarioInfo>& scenario_catalog();

/// Torque-angle curves M(q), dM/dq per (a, L0, delta) set; equilibrium samples flagged.
ResultTable run_torque_sweep(const ScenarioConfig& cfg);

/// Control offset delta(q), unloaded and for each configured spring torque.
ResultTable run_control_map(const ScenarioConfig& cfg);

/// Unloaded pipeline over a target grid and/or explicit target list.
ResultTable run_reach(const ScenarioConfig& cfg);

/// Loaded pipeline; adds the joint torques of the end load.
ResultTable run_loaded_reach(const ScenarioConfig& cfg);

/// Throws Error{ConfigError} for an unknown name.
ResultTable run_scenario(const std::string& name, const ScenarioConfig& cfg);

/// Grid targets (row-major in y, then x) followed by the explicit ones.
std::vector<PlanarPoint> reach_targets(const ReachConfig& reach, double b);

}  // namespace dualtri
