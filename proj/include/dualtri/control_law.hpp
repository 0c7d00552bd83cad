#pragma once

#include <optional>
#include <string>

#include "dualtri/segment.hpp"

namespace dualtri {

/// Symmetric segment: a1 = a2 = a, b1 = b2 = b, k1 = k2 = k, nominal free length L0.
struct SymmetricSegmentParams {
  double a = 1.0;
  double b = 1.0;
  double k = 1.0;
  double L0 = 1.0;
  double q_max = kDefaultJointLimit;

  void validate() const;

  SegmentGeometry geometry() const { return SegmentGeometry::symmetric(a, b); }

  /// Free lengths (L0 - delta, L0 + delta).
  SpringConfig springs(double delta) const { return {k, k, L0 - delta, L0 + delta}; }

  /// Configured q_max clipped to the segment's fold angle.
  double joint_limit() const { return admissible_limit(geometry(), q_max); }

  double margin() const { return monotonicity_margin(a, b, L0); }
};

struct ControlOffset {
  double delta = 0.0;
  /// Set when the monotonicity margin is not positive; the offset is still returned.
  std::optional<std::string> advisory;
};

/// Sign s in symmetric_torque(p, loaded_control(p, q, m).delta, q) + s * m = 0.
///
/// loaded_control keeps the +M/2k term as published, so its torque argument is the
/// torque the springs must supply. The equilibrium solver takes the torque acting
/// on the joint, which is s times that argument.
inline constexpr double kLoadedControlSign = -1.0;

/// 2k[(b^2 - a^2) sin q - L0 b sin(q/2) + delta a cos(q/2)].
double symmetric_torque(const SymmetricSegmentParams& p, double delta, double q);

/// Offset placing the unloaded equilibrium at q_target.
///
/// Throws Error{ControlSingularity} when cos(q/2) < 1e-9, Error{JointLimitExceeded}
/// outside the joint limit, Error{OffsetOutOfRange} when |delta| > L0.
ControlOffset unloaded_control(const SymmetricSegmentParams& p, double q_target);

/// Offset placing the equilibrium at q_target while the springs carry m_ext.
/// Same errors as unloaded_control.
ControlOffset loaded_control(const SymmetricSegmentParams& p, double q_target, double m_ext);

}  // namespace dualtri
