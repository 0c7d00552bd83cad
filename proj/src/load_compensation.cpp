#include "dualtri/load_compensation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dualtri/errors.hpp"
#include "dualtri/segment.hpp"

namespace dualtri {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ResolutionResult resolve_configuration(const SymmetricSegmentParams& params,
                                       const ChainConfiguration& q0, const PlanarPoint& target,
                                       Objective objective, const PlanOptions& options) {
  ResolutionRequest req;
  req.b = params.b;
  req.q0 = q0;
  req.target = target;
  req.objective = objective;
  req.tolerance = options.tolerance;
  req.q_max = params.joint_limit();
  req.scan_samples = options.scan_samples;
  req.max_iterations = options.max_iterations;
  return resolve(req);
}

SegmentCheck check_segment(const SymmetricSegmentParams& params, double q, double delta,
                           double external_torque) {
  SegmentCheck check;
  const SegmentGeometry geom = params.geometry();
  const SpringConfig springs = params.springs(delta);
  try {
    check.residual = std::abs(joint_torque(geom, springs, q) + external_torque);
    check.torque_slope = torque_slope(geom, springs, q);
    check.stable = check.torque_slope < 0.0;
  } catch (const Error&) {
    check.residual = kInf;
    check.torque_slope = kInf;
    check.stable = false;
  }
  check.recovery_error = kInf;
  try {
    EquilibriumOptions opts;
    opts.q_max = params.q_max;
    for (const EquilibriumPoint& root : solve_equilibria(geom, springs, external_torque, opts)) {
      if (root.stable) check.recovery_error = std::min(check.recovery_error, std::abs(root.q - q));
    }
  } catch (const Error&) {
    // No equilibrium or invalid free lengths: recovery_error stays +inf.
  }
  return check;
}

}  // namespace

ControlInputs ControlInputs::from_deltas(const SymmetricSegmentParams& params,
                                        const std::array<double, 3>& deltas) {
  ControlInputs inputs;
  inputs.deltas = deltas;
  for (std::size_t i = 0; i < 3; ++i) {
    inputs.free_lengths[2 * i] = params.L0 - deltas[i];
    inputs.free_lengths[2 * i + 1] = params.L0 + deltas[i];
  }
  return inputs;
}

JointTorques joint_torques_from_force(const ChainJacobian& j, const PlanarLoad& load) {
  JointTorques torques;
  for (int i = 0; i < 3; ++i) {
    torques.m[i] = j(0, i) * load.fx + j(1, i) * load.fy + load.m_ext_end;
  }
  return torques;
}

Plan plan_unloaded(const SymmetricSegmentParams& params, const ChainConfiguration& q0,
                   const PlanarPoint& target, Objective objective, const PlanOptions& options) {
  params.validate();
  Plan plan;
  plan.resolution = resolve_configuration(params, q0, target, objective, options);
  plan.config = plan.resolution.q;

  std::array<double, 3> deltas{};
  for (int i = 0; i < 3; ++i) {
    const ControlOffset offset = unloaded_control(params, plan.config[i]);
    deltas[i] = offset.delta;
    if (offset.advisory && plan.advisories.empty()) plan.advisories.push_back(*offset.advisory);
  }
  plan.inputs = ControlInputs::from_deltas(params, deltas);
  return plan;
}

Plan plan_loaded(const SymmetricSegmentParams& params, const ChainConfiguration& q0,
                 const PlanarPoint& target, const PlanarLoad& load, Objective objective,
                 const PlanOptions& options) {
  params.validate();
  Plan plan;
  plan.resolution = resolve_configuration(params, q0, target, objective, options);
  plan.config = plan.resolution.q;
  plan.torques = joint_torques_from_force(jacobian(params.b, plan.config), load);

  const SegmentGeometry geom = params.geometry();
  std::array<double, 3> deltas{};
  for (int i = 0; i < 3; ++i) {
    const double q = plan.config[i];
    const ControlOffset offset = loaded_control(params, q, kLoadedControlSign * plan.torques.m[i]);
    deltas[i] = offset.delta;
    if (offset.advisory && plan.advisories.empty()) plan.advisories.push_back(*offset.advisory);
    const double slope = torque_slope(geom, params.springs(offset.delta), q);
    if (!(slope < 0.0)) {
      throw Error(ErrorCode::UnstableUnderLoad,
                  "segment " + std::to_string(i + 1) + " has torque slope " +
                      std::to_string(slope) + " at q = " + std::to_string(q));
    }
  }
  plan.inputs = ControlInputs::from_deltas(params, deltas);
  return plan;
}

StabilityReport verify_plan(const SymmetricSegmentParams& params, const ChainConfiguration& config,
                            const ControlInputs& inputs, const JointTorques& torques) {
  StabilityReport report;
  report.all_stable = true;
  for (int i = 0; i < 3; ++i) {
    SegmentCheck& check = report.segments[i];
    try {
      check = check_segment(params, config[i], inputs.deltas[i], torques.m[i]);
    } catch (const Error&) {
      check = {kInf, kInf, false, kInf};
    }
    report.all_stable = report.all_stable && check.stable;
    report.max_residual = std::max(report.max_residual, check.residual);
    report.max_recovery_error = std::max(report.max_recovery_error, check.recovery_error);
  }
  return report;
}

}  // namespace dualtri
