#pragma once

#include <optional>

#include <Eigen/Core>

#include "dualtri/chain.hpp"
#include "dualtri/segment.hpp"

namespace dualtri {

enum class Objective {
  MinSum,        ///< sum |q_i - q_i0|
  MinMax,        ///< max |q_i - q_i0|
  LeastSquares,  ///< sum (q_i - q_i0)^2
};

enum class BranchSet { Both, PositiveOnly, NegativeOnly };

struct ResolutionRequest {
  double b = 1.0;
  ChainConfiguration q0;
  PlanarPoint target;
  Objective objective = Objective::MinSum;
  /// Accepted end-point error [length].
  double tolerance = 1e-10;
  double q_max = kDefaultJointLimit;

  // q1 scan (MinSum, MinMax)
  int scan_samples = 2001;
  double refine_tolerance = 1e-10;
  BranchSet branches = BranchSet::Both;

  // relinearization loop and stationary refinement (LeastSquares); the budget
  // applies to each separately
  int max_iterations = 100;
  /// Norm of the component of q - q0 outside the row space of J at convergence [rad].
  double stationarity_tolerance = 1e-9;

  void validate() const;
};

struct ResolutionResult {
  ChainConfiguration q;
  double objective_value = 0.0;
  Branch branch_used = Branch::Positive;
  /// Relinearization steps until the end point is within tolerance (LeastSquares).
  int iterations = 0;
  /// Steps along the constraint curve until q - q0 is stationary (LeastSquares).
  int refinement_iterations = 0;
  /// First relinearized increment (LeastSquares only).
  std::optional<Eigen::Vector3d> first_step;
};

struct LagrangeSolution {
  Eigen::Vector3d dq;
  Eigen::Vector2d lambda;
};

double objective_value(Objective objective, const ChainConfiguration& q,
                       const ChainConfiguration& q0);

/// Minimum-norm increment J^T (J J^T)^-1 dp.
///
/// Throws Error{SingularConfiguration} when cond(J J^T) > 1e12.
Eigen::Vector3d least_squares_step(const ChainJacobian& j, const Eigen::Vector2d& dp);

/// Dense solve of the 5x5 stationarity system [[I, -J^T], [J, 0]] [dq; lambda] = [0; dp].
LagrangeSolution solve_lagrange_system(const ChainJacobian& j, const Eigen::Vector2d& dp);

ResolutionResult resolve_min_sum(const ResolutionRequest& req);
ResolutionResult resolve_min_max(const ResolutionRequest& req);
/// Relinearizes q <- q + J^+ (target - FK(q)) until the end point is within
/// tolerance, then moves along the constraint curve to the point where q - q0
/// lies in the row space of J. A q1 scan guards against local minima.
///
/// Throws Error{Unreachable} when no configuration within the joint limits
/// reaches the target, Error{SingularConfiguration} when a relinearization
/// meets cond(J J^T) > 1e12.
ResolutionResult resolve_least_squares(const ResolutionRequest& req);

/// Dispatches on req.objective.
ResolutionResult resolve(const ResolutionRequest& req);

}  // namespace dualtri
