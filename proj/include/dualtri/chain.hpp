#pragma once

#include <Eigen/Core>

namespace dualtri {

/// Joint angles (q1, q2, q3) of the three-segment chain [rad].
struct ChainConfiguration {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;

  double operator[](int i) const { return i == 0 ? q1 : (i == 1 ? q2 : q3); }
  double& operator[](int i) { return i == 0 ? q1 : (i == 1 ? q2 : q3); }

  Eigen::Vector3d vector() const { return {q1, q2, q3}; }
  static ChainConfiguration from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

  /// End-effector orientation q1 + q2 + q3. Reported, never constrained.
  double orientation() const { return q1 + q2 + q3; }

  bool within(double q_max) const;

  bool operator==(const ChainConfiguration&) const = default;
};

struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;

  Eigen::Vector2d vector() const { return {x, y}; }
  bool operator==(const PlanarPoint&) const = default;
};

/// d(x, y)/d(q1, q2, q3).
using ChainJacobian = Eigen::Matrix<double, 2, 3>;

/// Sign of sin(q3) selected in the two-link inverse kinematics.
enum class Branch { Positive, Negative };

inline int sign_of(Branch branch) { return branch == Branch::Positive ? 1 : -1; }

struct TwoLinkSolution {
  double q2 = 0.0;
  double q3 = 0.0;
};

/// Base offset b followed by links of length 2b, 2b and b.
PlanarPoint forward_kinematics(double b, const ChainConfiguration& q);

/// Solves (q2, q3) for a given q1 so the end point lands on target.
///
/// |cos q3| exceeding 1 by at most 1e-12 is clamped; beyond that throws
/// Error{Unreachable}. Branch::Positive yields q3 >= 0, Branch::Negative q3 <= 0.
TwoLinkSolution inverse_kinematics_branch(double b, const PlanarPoint& target, double q1,
                                          Branch branch);

ChainJacobian jacobian(double b, const ChainConfiguration& q);

}  // namespace dualtri
