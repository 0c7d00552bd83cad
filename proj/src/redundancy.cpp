#include "dualtri/redundancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "dualtri/errors.hpp"

namespace dualtri {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kTieTolerance = 1e-12;
constexpr std::size_t kMaxRefinedMinima = 16;
constexpr double kMaxStep = 0.5;  // rad, per least-squares iteration
constexpr double kInfeasible = std::numeric_limits<double>::infinity();

struct Candidate {
  ChainConfiguration q;
  double value = kInfeasible;
  Branch branch = Branch::Positive;
};

// Strict weak "better than" with the deterministic tie-break: objective, then
// distance of q1 from its start, then the positive branch.
bool better(const Candidate& lhs, const Candidate& rhs, double q1_start) {
  if (!std::isfinite(rhs.value)) return std::isfinite(lhs.value);
  if (!std::isfinite(lhs.value)) return false;
  if (std::abs(lhs.value - rhs.value) > kTieTolerance) return lhs.value < rhs.value;
  const double dl = std::abs(lhs.q.q1 - q1_start);
  const double dr = std::abs(rhs.q.q1 - q1_start);
  if (dl != dr) return dl < dr;
  return lhs.branch == Branch::Positive && rhs.branch == Branch::Negative;
}

class BranchScanner {
 public:
  BranchScanner(const ResolutionRequest& req, double limit) : req_(req), limit_(limit) {}

  Candidate evaluate(double q1, Branch branch) const {
    Candidate c;
    c.branch = branch;
    if (std::abs(q1) > limit_) return c;
    TwoLinkSolution sol;
    try {
      sol = inverse_kinematics_branch(req_.b, req_.target, q1, branch);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Unreachable) return c;
      throw;
    }
    c.q = {q1, sol.q2, sol.q3};
    if (!c.q.within(limit_)) return c;
    const PlanarPoint p = forward_kinematics(req_.b, c.q);
    if (std::hypot(p.x - req_.target.x, p.y - req_.target.y) > req_.tolerance) return c;
    c.value = objective_value(req_.objective, c.q, req_.q0);
    return c;
  }

  // Golden-section search on [lo, hi]; infeasible points count as +inf.
  Candidate refine(double lo, double hi, Branch branch) const {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    Candidate f1 = evaluate(x1, branch);
    Candidate f2 = evaluate(x2, branch);
    while (hi - lo > req_.refine_tolerance) {
      if (f1.value <= f2.value) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = evaluate(x1, branch);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = evaluate(x2, branch);
      }
    }
    return f1.value <= f2.value ? f1 : f2;
  }

  Candidate scan(Branch branch) const {
    const int n = req_.scan_samples;
    std::vector<double> grid(n);
    std::vector<Candidate> values(n);
    for (int i = 0; i < n; ++i) {
      grid[i] = i == n - 1 ? limit_ : -limit_ + 2.0 * limit_ * static_cast<double>(i) / (n - 1);
      values[i] = evaluate(grid[i], branch);
    }

    // Discrete local minima of the sampled objective, best first.
    std::vector<int> minima;
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(values[i].value)) continue;
      const double left = i > 0 ? values[i - 1].value : kInfeasible;
      const double right = i + 1 < n ? values[i + 1].value : kInfeasible;
      if (values[i].value <= left && values[i].value <= right) minima.push_back(i);
    }
    std::stable_sort(minima.begin(), minima.end(),
                     [&](int l, int r) { return values[l].value < values[r].value; });
    if (minima.size() > kMaxRefinedMinima) minima.resize(kMaxRefinedMinima);

    Candidate best;
    best.branch = branch;
    for (int i : minima) {
      Candidate local = values[i];
      const double lo = grid[std::max(i - 1, 0)];
      const double hi = grid[std::min(i + 1, n - 1)];
      const Candidate refined = refine(lo, hi, branch);
      if (better(refined, local, req_.q0.q1)) local = refined;
      if (better(local, best, req_.q0.q1)) best = local;
    }
    // The start angle itself: exact optimum for the zero-displacement task.
    const Candidate start = evaluate(req_.q0.q1, branch);
    if (better(start, best, req_.q0.q1)) best = start;
    return best;
  }

 private:
  const ResolutionRequest& req_;
  double limit_;
};

ResolutionResult resolve_by_scan(const ResolutionRequest& req) {
  req.validate();
  const BranchScanner scanner(req, req.q_max);
  Candidate best;
  if (req.branches != BranchSet::NegativeOnly) best = scanner.scan(Branch::Positive);
  if (req.branches != BranchSet::PositiveOnly) {
    const Candidate negative = scanner.scan(Branch::Negative);
    if (better(negative, best, req.q0.q1)) best = negative;
  }
  if (!std::isfinite(best.value)) {
    throw Error(ErrorCode::Unreachable,
                "no q1 and branch reaches (" + std::to_string(req.target.x) + ", " +
                    std::to_string(req.target.y) + ") within the joint limits");
  }
  ResolutionResult out;
  out.q = best.q;
  out.objective_value = best.value;
  out.branch_used = best.branch;
  return out;
}

double jjt_condition(const Eigen::Matrix2d& m) {
  const double trace = m(0, 0) + m(1, 1);
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double disc = std::sqrt(std::max(0.0, 0.25 * trace * trace - det));
  const double largest = 0.5 * trace + disc;
  const double smallest = largest > 0.0 ? det / largest : 0.0;
  if (!(smallest > 0.0)) return kInfeasible;
  return largest / smallest;
}

}  // namespace

void ResolutionRequest::validate() const {
  if (!(b > 0.0)) throw Error(ErrorCode::InvalidParameter, "b must be positive");
  if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidParameter, "tolerance must be positive");
  if (!(q_max > 0.0)) throw Error(ErrorCode::InvalidParameter, "q_max must be positive");
  if (scan_samples < 2) throw Error(ErrorCode::InvalidParameter, "scan_samples must be >= 2");
  if (!(refine_tolerance > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "refine_tolerance must be positive");
  }
  if (max_iterations < 0) throw Error(ErrorCode::InvalidParameter, "max_iterations < 0");
  if (!std::isfinite(target.x) || !std::isfinite(target.y)) {
    throw Error(ErrorCode::InvalidParameter, "target must be finite");
  }
}

double objective_value(Objective objective, const ChainConfiguration& q,
                       const ChainConfiguration& q0) {
  const Eigen::Vector3d d = q.vector() - q0.vector();
  switch (objective) {
    case Objective::MinSum: return d.cwiseAbs().sum();
    case Objective::MinMax: return d.cwiseAbs().maxCoeff();
    case Objective::LeastSquares: return d.squaredNorm();
  }
  return kInfeasible;
}

Eigen::Vector3d least_squares_step(const ChainJacobian& j, const Eigen::Vector2d& dp) {
  const Eigen::Matrix2d jjt = j * j.transpose();
  const double condition = jjt_condition(jjt);
  if (!(condition <= kMaxCondition)) {
    throw Error(ErrorCode::SingularConfiguration,
                "cond(J J^T) = " + std::to_string(condition) + " exceeds 1e12");
  }
  const double det = jjt(0, 0) * jjt(1, 1) - jjt(0, 1) * jjt(1, 0);
  Eigen::Matrix2d inv;
  inv << jjt(1, 1), -jjt(0, 1), -jjt(1, 0), jjt(0, 0);
  inv /= det;
  return j.transpose() * (inv * dp);
}

LagrangeSolution solve_lagrange_system(const ChainJacobian& j, const Eigen::Vector2d& dp) {
  const Eigen::JacobiSVD<ChainJacobian> svd(j);
  const Eigen::Vector2d sigma = svd.singularValues();
  const double ratio = sigma(1) > 0.0 ? sigma(0) / sigma(1) : kInfeasible;
  if (!(ratio * ratio <= kMaxCondition)) {
    throw Error(ErrorCode::SingularConfiguration, "Jacobian is rank deficient");
  }
  Eigen::Matrix<double, 5, 5> kkt = Eigen::Matrix<double, 5, 5>::Zero();
  kkt.topLeftCorner<3, 3>().setIdentity();
  kkt.topRightCorner<3, 2>() = -j.transpose();
  kkt.bottomLeftCorner<2, 3>() = j;
  Eigen::Matrix<double, 5, 1> rhs = Eigen::Matrix<double, 5, 1>::Zero();
  rhs.tail<2>() = dp;
  const Eigen::Matrix<double, 5, 1> sol = kkt.fullPivLu().solve(rhs);
  return {sol.head<3>(), sol.tail<2>()};
}

ResolutionResult resolve_min_sum(const ResolutionRequest& req) {
  ResolutionRequest r = req;
  r.objective = Objective::MinSum;
  return resolve_by_scan(r);
}

ResolutionResult resolve_min_max(const ResolutionRequest& req) {
  ResolutionRequest r = req;
  r.objective = Objective::MinMax;
  return resolve_by_scan(r);
}

namespace {

// Second derivatives of the end point, d2x/dqi dqj and d2y/dqi dqj.
std::pair<Eigen::Matrix3d, Eigen::Matrix3d> end_point_hessians(double b, const ChainConfiguration& q) {
  const double lengths[3] = {2.0 * b, 2.0 * b, b};
  double phi[3];
  phi[0] = q.q1;
  phi[1] = phi[0] + q.q2;
  phi[2] = phi[1] + q.q3;
  Eigen::Matrix3d hx, hy;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double cx = 0.0, cy = 0.0;
      for (int k = std::max(i, j); k < 3; ++k) {
        cx -= lengths[k] * std::cos(phi[k]);
        cy -= lengths[k] * std::sin(phi[k]);
      }
      hx(i, j) = cx;
      hy(i, j) = cy;
    }
  }
  return {hx, hy};
}

std::string format_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct LeastSquaresPoint {
  Eigen::Vector3d q;
  Eigen::Vector2d residual;
  ChainJacobian j;
};

LeastSquaresPoint evaluate_point(const ResolutionRequest& req, const Eigen::Vector3d& q) {
  const ChainConfiguration config = ChainConfiguration::from(q);
  return {q, req.target.vector() - forward_kinematics(req.b, config).vector(), jacobian(req.b, config)};
}

// One relinearization step, shortened to kMaxStep and halved until the
// end-point error drops.
LeastSquaresPoint relinearize(const ResolutionRequest& req, const LeastSquaresPoint& at,
                              Eigen::Vector3d* step_taken) {
  const Eigen::Vector3d step = least_squares_step(at.j, at.residual);
  double alpha = std::min(1.0, kMaxStep / step.norm());
  LeastSquaresPoint next = evaluate_point(req, at.q + alpha * step);
  for (int halving = 0; halving < 40 && !(next.residual.norm() < at.residual.norm()); ++halving) {
    alpha *= 0.5;
    next = evaluate_point(req, at.q + alpha * step);
  }
  if (step_taken) *step_taken = alpha * step;
  return next;
}

// Relinearizes until the end point is within tolerance; nullopt if that fails.
std::optional<LeastSquaresPoint> restore(const ResolutionRequest& req, LeastSquaresPoint at) {
  for (int pass = 0; pass < 20; ++pass) {
    if (at.residual.norm() <= req.tolerance) return at;
    at = relinearize(req, at, nullptr);
  }
  if (at.residual.norm() <= req.tolerance) return at;
  return std::nullopt;
}

// Newton steps on 0.5 |q - q0|^2 along the null-space direction n of J, with
// the curvature of the Lagrangian; a full-length downhill step where that is
// not convex. Each trial point is pulled back onto the constraint curve.
LeastSquaresPoint refine_stationary(const ResolutionRequest& req, LeastSquaresPoint at, int* steps) {
  const Eigen::Vector3d start = req.q0.vector();
  for (;;) {
    const Eigen::Vector3d offset = at.q - start;
    const Eigen::Vector3d n = at.j.row(0).transpose().cross(at.j.row(1).transpose()).normalized();
    const double gradient = n.dot(offset);
    if (std::abs(gradient) <= req.stationarity_tolerance) break;
    if (*steps == req.max_iterations) {
      throw Error(ErrorCode::MaxIterationsExceeded,
                  "q - q0 not stationary after " + std::to_string(req.max_iterations) +
                      " refinement steps, tangential component " + format_short(gradient));
    }
    const Eigen::Matrix2d jjt = at.j * at.j.transpose();
    const Eigen::Vector2d lambda = jjt.inverse() * (at.j * offset);
    const auto [hx, hy] = end_point_hessians(req.b, ChainConfiguration::from(at.q));
    const Eigen::Matrix3d h = Eigen::Matrix3d::Identity() - lambda(0) * hx - lambda(1) * hy;
    const double curvature = n.dot(h * n);
    double z = curvature > 1e-3 ? -gradient / curvature : -std::copysign(kMaxStep, gradient);
    z = std::clamp(z, -kMaxStep, kMaxStep);

    const double current = offset.squaredNorm();
    std::optional<LeastSquaresPoint> accepted;
    for (int halving = 0; halving < 40 && !accepted; ++halving, z *= 0.5) {
      std::optional<LeastSquaresPoint> trial = restore(req, evaluate_point(req, at.q + z * n));
      if (!trial) continue;
      // Close to the optimum the change in |q - q0|^2 is below rounding; there
      // a smaller tangential component is the acceptance test.
      const Eigen::Vector3d tn = trial->j.row(0).transpose().cross(trial->j.row(1).transpose()).normalized();
      const bool closer = std::abs(z) < 1e-4 && std::abs(tn.dot(trial->q - start)) < std::abs(gradient);
      if ((trial->q - start).squaredNorm() < current || closer) accepted = trial;
    }
    if (!accepted) {
      throw Error(ErrorCode::MaxIterationsExceeded,
                  "refinement stalled with tangential component " + format_short(gradient));
    }
    at = *accepted;
    ++*steps;
  }
  return at;
}

}  // namespace

ResolutionResult resolve_least_squares(const ResolutionRequest& req) {
  req.validate();
  const Eigen::Vector3d start = req.q0.vector();
  ResolutionResult out;

  // The q1 scan over both branches settles reachability within the joint
  // limits and gives the global minimum; the relinearized path from q0 can
  // stop in a local one.
  ResolutionRequest scan = req;
  scan.objective = Objective::LeastSquares;
  const ResolutionResult global = resolve_by_scan(scan);

  LeastSquaresPoint at = evaluate_point(req, start);
  for (;;) {
    if (at.residual.norm() <= req.tolerance) break;
    if (out.iterations == req.max_iterations) {
      throw Error(ErrorCode::MaxIterationsExceeded,
                  "no convergence after " + std::to_string(req.max_iterations) +
                      " iterations, residual " + std::to_string(at.residual.norm()));
    }
    Eigen::Vector3d step;
    at = relinearize(req, at, &step);
    if (!out.first_step) out.first_step = step;
    ++out.iterations;
  }
  at = refine_stationary(req, at, &out.refinement_iterations);

  const bool local_ok = ChainConfiguration::from(at.q).within(req.q_max);
  if (!local_ok || global.objective_value < (at.q - start).squaredNorm() - kTieTolerance) {
    int extra = 0;
    LeastSquaresPoint polished = refine_stationary(req, evaluate_point(req, global.q.vector()), &extra);
    if (!ChainConfiguration::from(polished.q).within(req.q_max) ||
        (polished.q - start).squaredNorm() > global.objective_value + kTieTolerance) {
      polished = evaluate_point(req, global.q.vector());
    }
    at = polished;
    out.refinement_iterations += extra;
  }

  out.q = ChainConfiguration::from(at.q);
  out.objective_value = objective_value(Objective::LeastSquares, out.q, req.q0);
  out.branch_used = out.q.q3 >= 0.0 ? Branch::Positive : Branch::Negative;
  return out;
}

ResolutionResult resolve(const ResolutionRequest& req) {
  switch (req.objective) {
    case Objective::MinSum: return resolve_min_sum(req);
    case Objective::MinMax: return resolve_min_max(req);
    case Objective::LeastSquares: return resolve_least_squares(req);
  }
  throw Error(ErrorCode::InvalidParameter, "unknown objective");
}

}  // namespace dualtri
