#include "dualtri/segment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dualtri/errors.hpp"

namespace dualtri {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidParameter,
                std::string(name) + " must be positive and finite, got " + std::to_string(value));
  }
}

double spring_angle(const SegmentGeometry& geom, double q, Side side) {
  return side == Side::First ? geom.beta12() + q : geom.beta12() - q;
}

// L^2 = c1^2 + c2^2 + 2 c1 c2 cos(theta), rewritten without cancellation near theta = pi.
double length_at(const SegmentGeometry& geom, double theta) {
  const double c1 = geom.c1();
  const double c2 = geom.c2();
  const double half_cos = std::cos(0.5 * theta);
  const double diff = c1 - c2;
  return std::sqrt(diff * diff + 4.0 * c1 * c2 * half_cos * half_cos);
}

double checked_length(const SegmentGeometry& geom, double theta) {
  const double length = length_at(geom, theta);
  if (length <= 1e-12 * (geom.c1() + geom.c2())) {
    throw Error(ErrorCode::DegenerateSpring,
                "spring length vanishes at theta = " + std::to_string(theta));
  }
  return length;
}

// (1 - L0/L) c1 c2 sin(theta): torque of one spring before stiffness and sign.
double spring_moment(const SegmentGeometry& geom, double theta, double free_length) {
  const double length = checked_length(geom, theta);
  return (1.0 - free_length / length) * geom.c1() * geom.c2() * std::sin(theta);
}

// d/dtheta of spring_moment. (c1 cos + c2)(c2 cos + c1) is the simplified
// cos(theta) L^2 + c1 c2 sin^2(theta).
double spring_moment_derivative(const SegmentGeometry& geom, double theta, double free_length) {
  const double c1 = geom.c1();
  const double c2 = geom.c2();
  const double length = checked_length(geom, theta);
  const double cos_theta = std::cos(theta);
  const double half_cos = std::cos(0.5 * theta);
  const double two_half_cos_sq = 2.0 * half_cos * half_cos;
  const double u = (c2 - c1) + c1 * two_half_cos_sq;  // c1 cos(theta) + c2
  const double v = (c1 - c2) + c2 * two_half_cos_sq;  // c2 cos(theta) + c1
  return c1 * c2 * (cos_theta - free_length * u * v / (length * length * length));
}

}  // namespace

SegmentGeometry::SegmentGeometry(double a1, double b1, double a2, double b2)
    : a1_(a1), b1_(b1), a2_(a2), b2_(b2) {
  require_positive(a1, "a1");
  require_positive(b1, "b1");
  require_positive(a2, "a2");
  require_positive(b2, "b2");
  c1_ = std::hypot(a1, b1);
  c2_ = std::hypot(a2, b2);
  beta12_ = std::atan(a1 / b1) + std::atan(a2 / b2);
}

void SpringConfig::validate() const {
  require_positive(k1, "k1");
  require_positive(k2, "k2");
  if (!(L10 >= 0.0) || !(L20 >= 0.0) || !std::isfinite(L10) || !std::isfinite(L20)) {
    throw Error(ErrorCode::InvalidParameter, "free lengths must be finite and nonnegative");
  }
}

double admissible_limit(const SegmentGeometry& geom, double q_max) {
  require_positive(q_max, "q_max");
  return std::min(q_max, geom.fold_angle() - kFoldMargin);
}

double spring_length(const SegmentGeometry& geom, double q, Side side) {
  return length_at(geom, spring_angle(geom, q, side));
}

double joint_torque(const SegmentGeometry& geom, const SpringConfig& springs, double q) {
  const double m1 = springs.k1 * spring_moment(geom, spring_angle(geom, q, Side::First), springs.L10);
  const double m2 = -springs.k2 * spring_moment(geom, spring_angle(geom, q, Side::Second), springs.L20);
  return m1 + m2;
}

double torque_slope(const SegmentGeometry& geom, const SpringConfig& springs, double q) {
  // theta_2 = beta12 - q, so the chain rule flips the sign of the second term back.
  const double d1 =
      springs.k1 * spring_moment_derivative(geom, spring_angle(geom, q, Side::First), springs.L10);
  const double d2 =
      springs.k2 * spring_moment_derivative(geom, spring_angle(geom, q, Side::Second), springs.L20);
  return d1 + d2;
}

double rotational_stiffness(const SegmentGeometry& geom, const SpringConfig& springs) {
  return -torque_slope(geom, springs, 0.0);
}

std::vector<EquilibriumPoint> solve_equilibria(const SegmentGeometry& geom,
                                               const SpringConfig& springs, double m_ext,
                                               const EquilibriumOptions& options) {
  springs.validate();
  if (options.samples < 2) {
    throw Error(ErrorCode::InvalidParameter, "equilibrium scan needs at least 2 samples");
  }
  if (!std::isfinite(m_ext)) {
    throw Error(ErrorCode::InvalidParameter, "external torque must be finite");
  }
  const double limit = admissible_limit(geom, options.q_max);
  const int n = options.samples;
  const auto residual = [&](double q) { return joint_torque(geom, springs, q) + m_ext; };
  const auto grid = [&](int i) {
    return i == n - 1 ? limit : -limit + 2.0 * limit * static_cast<double>(i) / (n - 1);
  };

  std::vector<EquilibriumPoint> roots;
  const auto push_root = [&](double q) {
    roots.push_back({q, false, torque_slope(geom, springs, q)});
    roots.back().stable = roots.back().torque_slope < 0.0;
  };

  double q_lo = grid(0);
  double f_lo = residual(q_lo);
  for (int i = 1; i < n; ++i) {
    const double q_hi = grid(i);
    const double f_hi = residual(q_hi);
    if (f_lo == 0.0) {
      push_root(q_lo);
    } else if (f_hi != 0.0 && std::signbit(f_lo) != std::signbit(f_hi)) {
      double lo = q_lo, hi = q_hi, flo = f_lo;
      while (hi - lo > options.q_tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fmid = residual(mid);
        if (fmid == 0.0) {
          lo = hi = mid;
          break;
        }
        if (std::signbit(fmid) == std::signbit(flo)) {
          lo = mid;
          flo = fmid;
        } else {
          hi = mid;
        }
      }
      push_root(0.5 * (lo + hi));
    }
    q_lo = q_hi;
    f_lo = f_hi;
  }
  if (f_lo == 0.0) push_root(q_lo);

  if (roots.empty()) {
    throw Error(ErrorCode::NoEquilibrium,
                "M(q) + M_ext has no sign change on [-" + std::to_string(limit) + ", " +
                    std::to_string(limit) + "]");
  }
  return roots;
}

double monotonicity_margin(double a, double b, double L0) {
  require_positive(a, "a");
  require_positive(b, "b");
  const double ratio = a / b;
  return L0 - 2.0 * b * (1.0 - ratio * ratio);
}

}  // namespace dualtri
