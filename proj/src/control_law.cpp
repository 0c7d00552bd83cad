#include "dualtri/control_law.hpp"

#include <cmath>
#include <string>

#include "dualtri/errors.hpp"

namespace dualtri {

namespace {

constexpr double kSingularCos = 1e-9;

}  // namespace

void SymmetricSegmentParams::validate() const {
  // SegmentGeometry and SpringConfig carry the positivity checks.
  (void)geometry();
  SpringConfig{k, k, L0, L0}.validate();
  if (!(q_max > 0.0) || !std::isfinite(q_max)) {
    throw Error(ErrorCode::InvalidParameter, "q_max must be positive and finite");
  }
}

double symmetric_torque(const SymmetricSegmentParams& p, double delta, double q) {
  const double half = 0.5 * q;
  return 2.0 * p.k *
         ((p.b * p.b - p.a * p.a) * std::sin(q) - p.L0 * p.b * std::sin(half) +
          delta * p.a * std::cos(half));
}

ControlOffset loaded_control(const SymmetricSegmentParams& p, double q_target, double m_ext) {
  p.validate();
  const double half_cos = std::cos(0.5 * q_target);
  if (!std::isfinite(q_target) || std::abs(half_cos) < kSingularCos) {
    throw Error(ErrorCode::ControlSingularity,
                "cos(q/2) vanishes at q = " + std::to_string(q_target));
  }
  if (std::abs(q_target) > p.joint_limit()) {
    throw Error(ErrorCode::JointLimitExceeded,
                "q = " + std::to_string(q_target) + " exceeds joint limit " +
                    std::to_string(p.joint_limit()));
  }

  const double numerator = m_ext / (2.0 * p.k) + p.L0 * p.b * std::sin(0.5 * q_target) -
                           (p.b * p.b - p.a * p.a) * std::sin(q_target);
  ControlOffset out;
  out.delta = numerator / (p.a * half_cos);
  if (std::abs(out.delta) > p.L0) {
    throw Error(ErrorCode::OffsetOutOfRange,
                "|delta| = " + std::to_string(std::abs(out.delta)) + " exceeds L0 = " +
                    std::to_string(p.L0));
  }
  const double margin = p.margin();
  if (!(margin > 0.0)) {
    out.advisory = "monotonicity margin " + std::to_string(margin) +
                   " is not positive; equilibria may be unstable";
  }
  return out;
}

ControlOffset unloaded_control(const SymmetricSegmentParams& p, double q_target) {
  return loaded_control(p, q_target, 0.0);
}

}  // namespace dualtri
