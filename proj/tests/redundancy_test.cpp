#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "dualtri/chain.hpp"
#include "dualtri/errors.hpp"
#include "dualtri/redundancy.hpp"

using namespace dualtri;

namespace {

const ChainConfiguration kQ0{-0.1, 0.1, 0.1};

ResolutionRequest request(const PlanarPoint& target, Objective objective,
                          const ChainConfiguration& q0 = kQ0) {
  ResolutionRequest req;
  req.q0 = q0;
  req.target = target;
  req.objective = objective;
  return req;
}

// Best objective among random configurations that reach the target: uniform q1,
// random branch, two-link closure, joint limits enforced.
double random_feasible_best(const ResolutionRequest& req, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> q1_dist(-req.q_max, req.q_max);
  std::bernoulli_distribution coin(0.5);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double q1 = q1_dist(rng);
    const Branch br = coin(rng) ? Branch::Positive : Branch::Negative;
    try {
      const TwoLinkSolution s = inverse_kinematics_branch(req.b, req.target, q1, br);
      const ChainConfiguration q{q1, s.q2, s.q3};
      if (!q.within(req.q_max)) continue;
      const Eigen::Vector3d d = q.vector() - req.q0.vector();
      double value = 0.0;
      switch (req.objective) {
        case Objective::MinSum: value = d.cwiseAbs().sum(); break;
        case Objective::MinMax: value = d.cwiseAbs().maxCoeff(); break;
        case Objective::LeastSquares: value = d.squaredNorm(); break;
      }
      best = std::min(best, value);
    } catch (const Error&) {
    }
  }
  return best;
}

ChainJacobian random_jacobian(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-1.4, 1.4);
  for (;;) {
    const ChainConfiguration q{angle(rng), angle(rng), angle(rng)};
    const ChainJacobian j = jacobian(1.0, q);
    const Eigen::JacobiSVD<ChainJacobian> svd(j);
    if (svd.singularValues()(1) > 1e-2) return j;
  }
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidParameter;
}

}  // namespace

TEST(LeastSquaresStep, ZeroDisplacement) {
  const Eigen::Vector3d dq = least_squares_step(jacobian(1.0, kQ0), Eigen::Vector2d::Zero());
  EXPECT_EQ(dq, Eigen::Vector3d::Zero());
}

TEST(LeastSquaresStep, SingularAtStraightChain) {
  EXPECT_EQ(code_of([] { least_squares_step(jacobian(1.0, {0, 0, 0}), Eigen::Vector2d(0.1, 0.1)); }),
            ErrorCode::SingularConfiguration);
  EXPECT_EQ(code_of([] { solve_lagrange_system(jacobian(1.0, {0, 0, 0}), Eigen::Vector2d(0.1, 0.1)); }),
            ErrorCode::SingularConfiguration);
}

TEST(LeastSquaresStep, SatisfiesConstraintWithMinimumNorm) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 50; ++t) {
    const ChainJacobian j = random_jacobian(rng);
    const Eigen::Vector2d dp(n01(rng), n01(rng));
    const Eigen::Vector3d dq = least_squares_step(j, dp);
    EXPECT_LE((j * dq - dp).norm(), 1e-12 * std::max(1.0, dp.norm()));

    // Null-space direction of J; every other solution is dq + t * n.
    const Eigen::Vector3d null = j.row(0).transpose().cross(j.row(1).transpose()).normalized();
    std::uniform_real_distribution<double> shift(-2.0, 2.0);
    for (int s = 0; s < 1000; ++s) {
      const Eigen::Vector3d other = dq + shift(rng) * null;
      ASSERT_LE(dq.norm(), other.norm() + 1e-14);
    }
  }
}

TEST(LagrangeSystem, ZeroDisplacement) {
  const LagrangeSolution s = solve_lagrange_system(jacobian(1.0, kQ0), Eigen::Vector2d::Zero());
  EXPECT_EQ(s.dq.norm(), 0.0);
  EXPECT_EQ(s.lambda.norm(), 0.0);
}

TEST(LagrangeSystem, StationarityAndAgreementWithClosedForm) {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 200; ++t) {
    const ChainJacobian j = random_jacobian(rng);
    const Eigen::Vector2d dp(n01(rng), n01(rng));
    const LagrangeSolution s = solve_lagrange_system(j, dp);
    for (int i = 0; i < 3; ++i) {
      const double residual = s.dq(i) - (s.lambda(0) * j(0, i) + s.lambda(1) * j(1, i));
      ASSERT_LE(std::abs(residual), 1e-12);
    }
    ASSERT_LE((s.dq - least_squares_step(j, dp)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(MinSum, ZeroDisplacementKeepsStart) {
  const ResolutionResult r = resolve_min_sum(request(forward_kinematics(1.0, kQ0), Objective::MinSum));
  EXPECT_NEAR(r.q.q1, kQ0.q1, 1e-12);
  EXPECT_NEAR(r.q.q2, kQ0.q2, 1e-12);
  EXPECT_NEAR(r.q.q3, kQ0.q3, 1e-12);
  EXPECT_NEAR(r.objective_value, 0.0, 1e-12);
}

TEST(MinMax, ZeroDisplacementKeepsStart) {
  const ResolutionResult r = resolve_min_max(request(forward_kinematics(1.0, kQ0), Objective::MinMax));
  EXPECT_NEAR((r.q.vector() - kQ0.vector()).norm(), 0.0, 1e-12);
  EXPECT_NEAR(r.objective_value, 0.0, 1e-12);
}

TEST(MinSum, StraightStartIsIdentityTask) {
  const ChainConfiguration straight{0.0, 0.0, 0.0};
  const ResolutionResult r = resolve_min_sum(request({6.0, 0.0}, Objective::MinSum, straight));
  EXPECT_EQ(r.q, straight);
  EXPECT_EQ(r.objective_value, 0.0);
  EXPECT_EQ(r.branch_used, Branch::Positive);
}

TEST(ScanObjectives, DominateRandomFeasibleSearch) {
  const PlanarPoint base = forward_kinematics(1.0, kQ0);
  for (const auto& [dx, dy] : {std::pair{-0.2, 0.3}, std::pair{-0.05, -0.02}, std::pair{-0.6, 0.8}}) {
    for (Objective obj : {Objective::MinSum, Objective::MinMax}) {
      const ResolutionRequest req = request({base.x + dx, base.y + dy}, obj);
      const ResolutionResult r = resolve(req);
      EXPECT_TRUE(r.q.within(req.q_max));
      const PlanarPoint p = forward_kinematics(1.0, r.q);
      EXPECT_LE(std::hypot(p.x - req.target.x, p.y - req.target.y), req.tolerance);
      EXPECT_LE(r.objective_value, random_feasible_best(req, 10000, 99) + 1e-6);
    }
  }
}

TEST(ScanObjectives, MinMaxSpreadNoWorseThanMinSum) {
  const ChainConfiguration q0{0.02, -0.01, 0.03};
  const PlanarPoint target{5.7, 0.0};
  const ResolutionResult sum = resolve_min_sum(request(target, Objective::MinSum, q0));
  const ResolutionResult max = resolve_min_max(request(target, Objective::MinMax, q0));
  const double sum_largest = (sum.q.vector() - q0.vector()).cwiseAbs().maxCoeff();
  EXPECT_LE(max.objective_value, sum_largest + 1e-9);
  EXPECT_LE(sum.objective_value,
            (max.q.vector() - q0.vector()).cwiseAbs().sum() + 1e-9);
}

TEST(ScanObjectives, NegativeBranchOnlyTarget) {
  // With |q| <= 0.6 this end point has no q3 >= 0 solution.
  ResolutionRequest req = request(forward_kinematics(1.0, {-0.3, -0.45, -0.45}), Objective::MinSum,
                                  {0.0, 0.1, 0.1});
  req.q_max = 0.6;
  const ResolutionResult r = resolve(req);
  EXPECT_EQ(r.branch_used, Branch::Negative);
  EXPECT_LE(r.q.q3, 0.0);

  req.branches = BranchSet::PositiveOnly;
  EXPECT_EQ(code_of([&] { resolve(req); }), ErrorCode::Unreachable);
}

TEST(ScanObjectives, DroppingABranchNeverImproves) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> offset(-0.5, 0.5);
  const PlanarPoint base = forward_kinematics(1.0, kQ0);
  for (int t = 0; t < 10; ++t) {
    for (Objective obj : {Objective::MinSum, Objective::MinMax}) {
      ResolutionRequest req = request({base.x + offset(rng), base.y + offset(rng)}, obj);
      req.scan_samples = 401;
      double both;
      try {
        both = resolve(req).objective_value;
      } catch (const Error&) {
        continue;
      }
      for (BranchSet only : {BranchSet::PositiveOnly, BranchSet::NegativeOnly}) {
        req.branches = only;
        try {
          EXPECT_GE(resolve(req).objective_value, both - 1e-12);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::Unreachable);
        }
      }
    }
  }
}

TEST(ScanObjectives, UnreachableTarget) {
  EXPECT_EQ(code_of([] { resolve(request({9.0, 0.0}, Objective::MinSum)); }), ErrorCode::Unreachable);
  EXPECT_EQ(code_of([] { resolve(request({9.0, 0.0}, Objective::MinMax)); }), ErrorCode::Unreachable);
}

TEST(LeastSquares, ZeroDisplacementNoIterations) {
  const ResolutionResult r = resolve_least_squares(request(forward_kinematics(1.0, kQ0), Objective::LeastSquares));
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.q, kQ0);
  EXPECT_FALSE(r.first_step.has_value());
}

TEST(LeastSquares, SmallStepIsLinear) {
  const PlanarPoint base = forward_kinematics(1.0, kQ0);
  const Eigen::Vector2d dp = Eigen::Vector2d(0.6, -0.8) * 1e-4;
  const ResolutionResult r =
      resolve_least_squares(request({base.x + dp.x(), base.y + dp.y()}, Objective::LeastSquares));
  EXPECT_LE(r.iterations, 2);
  ASSERT_TRUE(r.first_step.has_value());
  const Eigen::Vector3d single = least_squares_step(jacobian(1.0, kQ0), dp);
  EXPECT_LE((*r.first_step - single).norm(), 1e-6 * single.norm());
}

TEST(LeastSquares, ModerateStepDominatesRandomSearch) {
  const PlanarPoint base = forward_kinematics(1.0, kQ0);
  const ResolutionRequest req =
      request({base.x - 0.18, base.y + 0.24}, Objective::LeastSquares);  // |dp| = 0.3 b
  const ResolutionResult r = resolve_least_squares(req);
  const PlanarPoint p = forward_kinematics(1.0, r.q);
  EXPECT_LE(std::hypot(p.x - req.target.x, p.y - req.target.y), req.tolerance);
  EXPECT_LE(r.objective_value, random_feasible_best(req, 10000, 7) + 1e-6);
}

TEST(LeastSquares, LeavesLocalMinimum) {
  // Relinearizing from q0 settles at a stationary point with sum of squares 0.1342;
  // the global minimum on the same branch is 0.1211.
  const ResolutionRequest req =
      request({5.6180243286363218, -1.8621880910488122}, Objective::LeastSquares);
  const ResolutionResult r = resolve_least_squares(req);
  EXPECT_LT(r.objective_value, 0.1215);
  EXPECT_LE(r.objective_value, random_feasible_best(req, 10000, 11) + 1e-6);

  const ChainJacobian j = jacobian(1.0, r.q);
  const Eigen::Vector3d n = j.row(0).transpose().cross(j.row(1).transpose()).normalized();
  EXPECT_LE(std::abs(n.dot(r.q.vector() - kQ0.vector())), req.stationarity_tolerance);
  const PlanarPoint p = forward_kinematics(1.0, r.q);
  EXPECT_LE(std::hypot(p.x - req.target.x, p.y - req.target.y), req.tolerance);
}

TEST(LeastSquares, SingularStart) {
  EXPECT_EQ(code_of([] {
              resolve_least_squares(request({5.9, 0.1}, Objective::LeastSquares, {0.0, 0.0, 0.0}));
            }),
            ErrorCode::SingularConfiguration);
}

TEST(LeastSquares, IterationBudget) {
  const PlanarPoint base = forward_kinematics(1.0, kQ0);
  ResolutionRequest req = request({base.x - 0.18, base.y + 0.24}, Objective::LeastSquares);
  req.max_iterations = 1;
  EXPECT_EQ(code_of([&] { resolve_least_squares(req); }), ErrorCode::MaxIterationsExceeded);
  req.max_iterations = 100;
  const ResolutionResult r = resolve_least_squares(req);
  EXPECT_GT(r.iterations, 1);
  EXPECT_GT(r.refinement_iterations, 0);
}

TEST(ResolutionRequest, Validation) {
  ResolutionRequest req = request({5.0, 0.0}, Objective::MinSum);
  req.tolerance = 0.0;
  EXPECT_EQ(code_of([&] { resolve(req); }), ErrorCode::InvalidParameter);
}
