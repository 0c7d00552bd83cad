#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "dualtri/control_law.hpp"
#include "dualtri/errors.hpp"
#include "dualtri/segment.hpp"

using namespace dualtri;

namespace {

const SymmetricSegmentParams kStable{1.1, 1.0, 1.0, 0.7};

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

TEST(SymmetricTorque, ZeroAtRest) { EXPECT_EQ(symmetric_torque(kStable, 0.0, 0.0), 0.0); }

TEST(SymmetricTorque, OffsetOnlyAtZeroAngle) {
  EXPECT_DOUBLE_EQ(symmetric_torque({1.1, 1.0, 3.0, 0.7}, 0.2, 0.0), 2.0 * 3.0 * 0.2 * 1.1);
}

TEST(SymmetricTorque, MatchesGeneralTorqueOnRandomGrid) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int t = 0; t < 100; ++t) {
    const SymmetricSegmentParams p{u(rng), u(rng), u(rng), u(rng)};
    std::uniform_real_distribution<double> delta(-p.L0, p.L0);
    std::uniform_real_distribution<double> angle(-p.joint_limit(), p.joint_limit());
    const double d = delta(rng);
    for (int i = 0; i < 10; ++i) {
      const double q = angle(rng);
      const double reference = joint_torque(p.geometry(), p.springs(d), q);
      EXPECT_NEAR(symmetric_torque(p, d, q), reference, 1e-10 * std::max(1.0, std::abs(reference)));
    }
  }
}

TEST(UnloadedControl, ZeroTarget) { EXPECT_EQ(unloaded_control(kStable, 0.0).delta, 0.0); }

TEST(UnloadedControl, SquareTrianglesReduceToTangent) {
  const SymmetricSegmentParams p{1.0, 1.0, 1.0, 0.8};
  for (double q : {-1.0, -0.3, 0.2, 0.9}) {
    EXPECT_NEAR(unloaded_control(p, q).delta, 0.8 * std::tan(q / 2.0), 1e-15);
  }
}

TEST(UnloadedControl, BalancesTorqueAndIsStable) {
  for (double q : {-1.2, -0.4, 0.05, 0.2, 0.8, 1.25}) {
    const double delta = unloaded_control(kStable, q).delta;
    EXPECT_NEAR(symmetric_torque(kStable, delta, q), 0.0, 1e-12 * kStable.k * kStable.b * kStable.b);
    EXPECT_LT(torque_slope(kStable.geometry(), kStable.springs(delta), q), 0.0);
  }
}

TEST(UnloadedControl, RoundTripThroughEquilibriumSolver) {
  const double delta = unloaded_control(kStable, 0.2).delta;
  const auto roots = solve_equilibria(kStable.geometry(), kStable.springs(delta), 0.0);
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_NEAR(roots[0].q, 0.2, 1e-8);
  EXPECT_TRUE(roots[0].stable);
}

TEST(UnloadedControl, OddInTarget) {
  // |delta| <= L0 caps the reachable angle near 1.277 rad for these parameters.
  for (double q = 0.05; q < 1.27; q += 0.1) {
    EXPECT_DOUBLE_EQ(unloaded_control(kStable, -q).delta, -unloaded_control(kStable, q).delta);
  }
}

TEST(UnloadedControl, ContinuousOnGrid) {
  // |delta'(q)| is bounded on the admissible range; adjacent samples differ by at most bound * h.
  const double limit = 1.25;
  const int n = 2000;
  const double h = 2.0 * limit / n;
  double prev = unloaded_control(kStable, -limit).delta;
  for (int i = 1; i <= n; ++i) {
    const double q = -limit + h * i;
    const double cur = unloaded_control(kStable, std::min(q, limit)).delta;
    const double local = std::abs(unloaded_control(kStable, std::min(q, limit)).delta -
                                  unloaded_control(kStable, q - 0.5 * h).delta) / (0.5 * h);
    EXPECT_LE(std::abs(cur - prev), 2.0 * local * h + 1e-12);
    prev = cur;
  }
}

TEST(UnloadedControl, AdvisoryOnNegativeMargin) {
  EXPECT_FALSE(unloaded_control(kStable, 0.3).advisory.has_value());
  const SymmetricSegmentParams weak{0.5, 1.0, 1.0, 1.0};
  ASSERT_LT(weak.margin(), 0.0);
  const ControlOffset out = unloaded_control(weak, 0.1);
  EXPECT_TRUE(out.advisory.has_value());
}

TEST(UnloadedControl, Errors) {
  EXPECT_EQ(code_of([&] { unloaded_control({1.0, 1.0, 1.0, 1.0, 4.0}, std::acos(-1.0)); }),
            ErrorCode::ControlSingularity);
  EXPECT_EQ(code_of([&] { unloaded_control(kStable, 1.5); }), ErrorCode::JointLimitExceeded);
  // Small L0 with large q: the needed offset exceeds the free length.
  EXPECT_EQ(code_of([&] { unloaded_control({0.5, 1.0, 1.0, 0.05}, 1.2); }),
            ErrorCode::OffsetOutOfRange);
  EXPECT_EQ(code_of([&] { unloaded_control({-1.0, 1.0, 1.0, 0.5}, 0.1); }),
            ErrorCode::InvalidParameter);
}

TEST(LoadedControl, ZeroAngleCompensatesLoad) {
  const SymmetricSegmentParams p{1.1, 1.0, 2.5, 0.7};
  EXPECT_NEAR(loaded_control(p, 0.0, 0.3).delta, 0.3 / (2.0 * 2.5 * 1.1), 1e-15);
}

TEST(LoadedControl, ReducesToUnloaded) {
  for (double q : {-0.7, 0.0, 0.4}) {
    EXPECT_EQ(loaded_control(kStable, q, 0.0).delta, unloaded_control(kStable, q).delta);
  }
}

TEST(LoadedControl, SignConventionByRoundTrip) {
  const double m_ext = 0.05;
  const double delta = loaded_control(kStable, 0.15, m_ext).delta;
  EXPECT_NEAR(symmetric_torque(kStable, delta, 0.15) + kLoadedControlSign * m_ext, 0.0, 1e-13);

  const auto roots =
      solve_equilibria(kStable.geometry(), kStable.springs(delta), kLoadedControlSign * m_ext);
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_NEAR(roots[0].q, 0.15, 1e-8);
  EXPECT_TRUE(roots[0].stable);

  // The opposite sign misses the target.
  const auto wrong = solve_equilibria(kStable.geometry(), kStable.springs(delta), -kLoadedControlSign * m_ext);
  EXPECT_GT(std::abs(wrong[0].q - 0.15), 1e-3);
}
