#pragma once

#include <array>
#include <string>
#include <vector>

#include "dualtri/chain.hpp"
#include "dualtri/control_law.hpp"
#include "dualtri/redundancy.hpp"

namespace dualtri {

/// External load at the end point. m_ext_end is a pure torque on the end effector.
struct PlanarLoad {
  double fx = 0.0;
  double fy = 0.0;
  double m_ext_end = 0.0;

  bool is_zero() const { return fx == 0.0 && fy == 0.0 && m_ext_end == 0.0; }
};

/// Per-segment offsets and the six free lengths (L_i1, L_i2) = (L0 - delta_i, L0 + delta_i).
struct ControlInputs {
  std::array<double, 3> deltas{};
  std::array<double, 6> free_lengths{};

  static ControlInputs from_deltas(const SymmetricSegmentParams& params,
                                   const std::array<double, 3>& deltas);

  bool operator==(const ControlInputs&) const = default;
};

/// Torques the external load exerts on the three joints.
struct JointTorques {
  std::array<double, 3> m{};

  bool operator==(const JointTorques&) const = default;
};

struct PlanOptions {
  double tolerance = 1e-10;
  int scan_samples = 2001;
  int max_iterations = 100;
};

struct Plan {
  ChainConfiguration config;
  ControlInputs inputs;
  JointTorques torques;
  ResolutionResult resolution;
  std::vector<std::string> advisories;
};

struct SegmentCheck {
  /// |M_i(q_i) + Mq_i| with the planned free lengths.
  double residual = 0.0;
  double torque_slope = 0.0;
  bool stable = false;
  /// Distance from q_i to the nearest stable root found by the equilibrium solver;
  /// +inf when there is none.
  double recovery_error = 0.0;
};

struct StabilityReport {
  std::array<SegmentCheck, 3> segments{};
  bool all_stable = false;
  double max_residual = 0.0;
  double max_recovery_error = 0.0;
};

/// Static joint torques J^T F, plus the end torque on every joint.
JointTorques joint_torques_from_force(const ChainJacobian& j, const PlanarLoad& load);

/// Redundancy resolution followed by the unloaded control law on every segment.
Plan plan_unloaded(const SymmetricSegmentParams& params, const ChainConfiguration& q0,
                   const PlanarPoint& target, Objective objective, const PlanOptions& options = {});

/// Keeps the unloaded configuration and compensates the joint torques of the load.
///
/// Throws Error{UnstableUnderLoad} if a segment's loaded equilibrium has a
/// nonnegative torque slope.
Plan plan_loaded(const SymmetricSegmentParams& params, const ChainConfiguration& q0,
                 const PlanarPoint& target, const PlanarLoad& load, Objective objective,
                 const PlanOptions& options = {});

/// Never throws; inconsistent inputs show up as residuals and unstable flags.
StabilityReport verify_plan(const SymmetricSegmentParams& params, const ChainConfiguration& config,
                            const ControlInputs& inputs, const JointTorques& torques);

}  // namespace dualtri
