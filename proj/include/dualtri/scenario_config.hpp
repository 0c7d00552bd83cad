#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dualtri/chain.hpp"
#include "dualtri/control_law.hpp"
#include "dualtri/load_compensation.hpp"
#include "dualtri/redundancy.hpp"

namespace dualtri {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct MechanismConfig {
  SymmetricSegmentParams params;
  /// True when b and k were omitted: lengths in b, torques in k*b^2.
  bool dimensionless = false;
};

struct SweepSet {
  std::string label;
  double a = 1.0;
  double L0 = 1.0;
  double delta = 0.0;
};

struct TorqueSweepConfig {
  std::optional<Range> q_range;  // defaults to the admissible range of each set
  int samples = 401;
  std::vector<SweepSet> sets;    // defaults to one set from the mechanism block
};

struct ControlMapConfig {
  std::optional<Range> q_range;
  int samples = 201;
  std::vector<double> loads;  // torques carried by the springs, one extra column each
};

/// Targets laid out as offsets from the initial end point; nx, ny odd keeps
/// the zero-displacement cell on the grid.
struct GridSpec {
  Range dx{-0.5, 0.5};
  Range dy{-0.5, 0.5};
  int nx = 11;
  int ny = 11;
};

struct ReachConfig {
  ChainConfiguration q0{-0.1, 0.1, 0.1};
  Objective objective = Objective::MinSum;
  std::optional<GridSpec> grid;
  std::vector<PlanarPoint> targets;
  PlanOptions plan;
  PlanarLoad load;  // loaded_reach only
};

struct OutputConfig {
  std::string path;  // empty: stdout
  std::string format = "csv";
};

struct ScenarioConfig {
  std::string scenario;  // optional default for `run`
  MechanismConfig mechanism;
  TorqueSweepConfig torque_sweep;
  ControlMapConfig control_map;
  ReachConfig reach;
  ReachConfig loaded_reach;
  OutputConfig output;
  int threads = 1;
};

/// Parses and validates a JSON scenario file. Unknown keys, wrong types and
/// out-of-range values throw Error{ConfigError} naming the offending field.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

const char* objective_name(Objective objective);

}  // namespace dualtri
