#include "dualtri/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dualtri/errors.hpp"

namespace dualtri {

namespace {

constexpr double kClampSlack = 1e-12;

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  angle = std::remainder(angle, two_pi);
  return angle <= -std::numbers::pi ? angle + two_pi : angle;
}

}  // namespace

bool ChainConfiguration::within(double q_max) const {
  return std::abs(q1) <= q_max && std::abs(q2) <= q_max && std::abs(q3) <= q_max;
}

PlanarPoint forward_kinematics(double b, const ChainConfiguration& q) {
  const double a1 = q.q1;
  const double a12 = q.q1 + q.q2;
  const double a123 = a12 + q.q3;
  return {b + 2.0 * b * std::cos(a1) + 2.0 * b * std::cos(a12) + b * std::cos(a123),
          2.0 * b * std::sin(a1) + 2.0 * b * std::sin(a12) + b * std::sin(a123)};
}

TwoLinkSolution inverse_kinematics_branch(double b, const PlanarPoint& target, double q1,
                                          Branch branch) {
  if (!(b > 0.0)) throw Error(ErrorCode::InvalidParameter, "b must be positive");
  // Wrist-relative target: remove the base offset and the first 2b link.
  const double dx = target.x - b - 2.0 * b * std::cos(q1);
  const double dy = target.y - 2.0 * b * std::sin(q1);
  double c3 = (dx * dx + dy * dy - 5.0 * b * b) / (4.0 * b * b);
  if (!std::isfinite(c3) || std::abs(c3) > 1.0 + kClampSlack) {
    throw Error(ErrorCode::Unreachable,
                "target (" + std::to_string(target.x) + ", " + std::to_string(target.y) +
                    ") out of reach for q1 = " + std::to_string(q1));
  }
  c3 = std::clamp(c3, -1.0, 1.0);
  const double s3 = sign_of(branch) * std::sqrt(1.0 - c3 * c3);
  const double q3 = std::atan2(s3, c3);
  const double q2 = wrap_angle(std::atan2(dy, dx) - std::atan2(b * s3, 2.0 * b + b * c3) - q1);
  return {q2, q3};
}

ChainJacobian jacobian(double b, const ChainConfiguration& q) {
  const double a1 = q.q1;
  const double a12 = q.q1 + q.q2;
  const double a123 = a12 + q.q3;
  const double s1 = std::sin(a1), s12 = std::sin(a12), s123 = std::sin(a123);
  const double c1 = std::cos(a1), c12 = std::cos(a12), c123 = std::cos(a123);
  ChainJacobian j;
  j << -2.0 * b * s1 - 2.0 * b * s12 - b * s123, -2.0 * b * s12 - b * s123, -b * s123,
      2.0 * b * c1 + 2.0 * b * c12 + b * c123, 2.0 * b * c12 + b * c123, b * c123;
  return j;
}

}  // namespace dualtri
