#pragma once

#include <numbers>
#include <vector>

namespace dualtri {

/// Default configurable joint limit [rad].
inline constexpr double kDefaultJointLimit = std::numbers::pi / 2.0;

/// Distance kept from the fold angle (a spring axis crossing the joint) [rad].
inline constexpr double kFoldMargin = 1e-6;

/// Two rigid triangles (a1, b1) and (a2, b2) hinged at a passive joint.
class SegmentGeometry {
 public:
  /// Throws Error{InvalidParameter} unless every side is positive and finite.
  SegmentGeometry(double a1, double b1, double a2, double b2);

  static SegmentGeometry symmetric(double a, double b) { return {a, b, a, b}; }

  double a1() const { return a1_; }
  double b1() const { return b1_; }
  double a2() const { return a2_; }
  double b2() const { return b2_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }

  /// Rest angle between the two diagonals, atan(a1/b1) + atan(a2/b2).
  double beta12() const { return beta12_; }

  /// |q| at which one spring angle reaches pi and the triangles fold through.
  double fold_angle() const { return std::numbers::pi - beta12_; }

 private:
  double a1_, b1_, a2_, b2_;
  double c1_, c2_, beta12_;
};

/// Stiffnesses and non-stressed lengths of the two elastic edges.
struct SpringConfig {
  double k1 = 1.0;
  double k2 = 1.0;
  double L10 = 0.0;
  double L20 = 0.0;

  /// Throws Error{InvalidParameter} on k <= 0, negative free length or non-finite input.
  void validate() const;
};

enum class Side { First = 1, Second = 2 };

struct EquilibriumPoint {
  double q = 0.0;
  bool stable = false;
  double torque_slope = 0.0;
};

struct EquilibriumOptions {
  double q_max = kDefaultJointLimit;
  int samples = 2001;
  double q_tolerance = 1e-12;
};

/// Joint range actually scanned and accepted: the configured limit clipped to the
/// fold angle minus kFoldMargin.
double admissible_limit(const SegmentGeometry& geom, double q_max);

/// Spring length L_i(theta_i) with theta_1 = beta12 + q, theta_2 = beta12 - q.
double spring_length(const SegmentGeometry& geom, double q, Side side);

/// Net passive-joint torque M1(q) + M2(q) of the two preloaded springs.
///
/// Throws Error{DegenerateSpring} when a spring length vanishes.
double joint_torque(const SegmentGeometry& geom, const SpringConfig& springs, double q);

/// Analytic dM/dq.
double torque_slope(const SegmentGeometry& geom, const SpringConfig& springs, double q);

/// Equivalent rotational stiffness -dM/dq at q = 0.
double rotational_stiffness(const SegmentGeometry& geom, const SpringConfig& springs);

/// All roots of M(q) + m_ext on [-limit, limit], sorted by q, each tagged with its
/// stability (negative torque slope). Sign-scan bracketing followed by bisection.
///
/// Throws Error{NoEquilibrium} if the scan finds no sign change.
std::vector<EquilibriumPoint> solve_equilibria(const SegmentGeometry& geom,
                                               const SpringConfig& springs, double m_ext,
                                               const EquilibriumOptions& options = {});

/// L0 - 2b(1 - (a/b)^2). Positive means the symmetric torque-angle curve is monotone.
double monotonicity_margin(double a, double b, double L0);

}  // namespace dualtri
