#include "dualtri/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "dualtri/errors.hpp"
#include "dualtri/segment.hpp"

namespace dualtri {

namespace {

using Cell = std::optional<double>;

// Rows land in their own slot, so the table order never depends on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double sample(const Range& r, int i, int n) {
  return i == n - 1 ? r.hi : r.lo + (r.hi - r.lo) * static_cast<double>(i) / (n - 1);
}

Cell finite_or_empty(double v) { return std::isfinite(v) ? Cell(v) : std::nullopt; }

void add_mechanism_metadata(ResultTable& table, const ScenarioConfig& cfg,
                            const std::string& scenario) {
  const SymmetricSegmentParams& p = cfg.mechanism.params;
  table.add_metadata("tool", std::string("dualtri ") + kToolVersion);
  table.add_metadata("scenario", scenario);
  table.add_metadata("a", format_number(p.a));
  table.add_metadata("b", format_number(p.b));
  table.add_metadata("k", format_number(p.k));
  table.add_metadata("L0", format_number(p.L0));
  table.add_metadata("q_max", format_number(p.q_max));
  table.add_metadata("joint_limit", format_number(p.joint_limit()));
  table.add_metadata("monotonicity_margin", format_number(p.margin()));
  table.add_metadata("units", cfg.mechanism.dimensionless ? "lengths in b, torques in k*b^2"
                                                          : "absolute");
}

Range checked_range(const std::optional<Range>& requested, double limit, const char* field) {
  if (!requested) return {-limit, limit};
  if (std::abs(requested->lo) > limit || std::abs(requested->hi) > limit) {
    throw Error(ErrorCode::ConfigError, std::string(field) + ": range exceeds the admissible joint limit " +
                                            format_number(limit));
  }
  return *requested;
}

std::vector<std::string> reach_columns(bool loaded) {
  std::vector<std::string> cols = {"ix", "iy", "x", "y", "q1", "q2", "q3", "orientation",
                                   "objective", "branch", "iterations"};
  if (loaded) {
    for (const char* c : {"Mq1", "Mq2", "Mq3"}) cols.emplace_back(c);
  }
  for (const char* c : {"delta1", "delta2", "delta3", "L11", "L12", "L21", "L22", "L31", "L32",
                        "stable1", "stable2", "stable3", "max_residual", "recovery_error"}) {
    cols.emplace_back(c);
  }
  return cols;
}

ResultTable run_reach_impl(const ScenarioConfig& cfg, bool loaded) {
  const SymmetricSegmentParams& params = cfg.mechanism.params;
  params.validate();
  const ReachConfig& reach = loaded ? cfg.loaded_reach : cfg.reach;
  const std::vector<PlanarPoint> targets = reach_targets(reach, params.b);
  const std::size_t nx = reach.grid ? reach.grid->nx : 0;
  const std::size_t grid_cells = reach.grid ? nx * reach.grid->ny : 0;

  ResultTable table(reach_columns(loaded));
  const std::string name = loaded ? "loaded_reach" : "reach";
  add_mechanism_metadata(table, cfg, name);
  table.add_metadata("objective", objective_name(reach.objective));
  table.add_metadata("q0", format_number(reach.q0.q1) + " " + format_number(reach.q0.q2) + " " +
                               format_number(reach.q0.q3));
  if (loaded) {
    table.add_metadata("load", format_number(reach.load.fx) + " " + format_number(reach.load.fy) +
                                   " " + format_number(reach.load.m_ext_end));
    table.add_metadata("torque_convention",
                       "Mq = J^T F + m_end; spring torque balances M(q) + Mq = 0");
  }

  std::vector<ResultRow> rows(targets.size());
  parallel_for(targets.size(), cfg.threads, [&](std::size_t t) {
    ResultRow row;
    const PlanarPoint& target = targets[t];
    const bool on_grid = t < grid_cells;
    row.values = {on_grid ? Cell(static_cast<double>(t % nx)) : Cell(-1.0),
                  on_grid ? Cell(static_cast<double>(t / nx)) : Cell(-1.0), target.x, target.y};
    row.values.resize(table.columns().size());
    try {
      const Plan plan = loaded ? plan_loaded(params, reach.q0, target, reach.load, reach.objective,
                                             reach.plan)
                               : plan_unloaded(params, reach.q0, target, reach.objective, reach.plan);
      const StabilityReport report = verify_plan(params, plan.config, plan.inputs, plan.torques);
      std::size_t c = 4;
      for (int i = 0; i < 3; ++i) row.values[c++] = plan.config[i];
      row.values[c++] = plan.config.orientation();
      row.values[c++] = plan.resolution.objective_value;
      row.values[c++] = static_cast<double>(sign_of(plan.resolution.branch_used));
      row.values[c++] = static_cast<double>(plan.resolution.iterations);
      if (loaded) {
        for (double m : plan.torques.m) row.values[c++] = m;
      }
      for (double d : plan.inputs.deltas) row.values[c++] = d;
      for (double l : plan.inputs.free_lengths) row.values[c++] = l;
      for (const SegmentCheck& s : report.segments) row.values[c++] = s.stable ? 1.0 : 0.0;
      row.values[c++] = finite_or_empty(report.max_residual);
      row.values[c++] = finite_or_empty(report.max_recovery_error);
      if (!report.all_stable) row.status = "unstable";
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidParameter || e.code() == ErrorCode::ConfigError) throw;
      row.status = std::string(to_string(e.code()));
    }
    rows[t] = std::move(row);
  });
  for (ResultRow& row : rows) table.add_row(std::move(row));
  return table;
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_catalog() {
  static const std::vector<ScenarioInfo> catalog = {
      {"torque_sweep", "torque-angle curves M(q) and dM/dq with flagged equilibria"},
      {"control_map", "control offset delta(q), unloaded and under spring torques"},
      {"reach", "unloaded control pipeline over a target grid"},
      {"loaded_reach", "loaded control pipeline with an end-point force"},
  };
  return catalog;
}

std::vector<PlanarPoint> reach_targets(const ReachConfig& reach, double b) {
  std::vector<PlanarPoint> targets;
  if (reach.grid) {
    const PlanarPoint base = forward_kinematics(b, reach.q0);
    const GridSpec& g = *reach.grid;
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        targets.push_back({base.x + sample(g.dx, ix, g.nx), base.y + sample(g.dy, iy, g.ny)});
      }
    }
  }
  targets.insert(targets.end(), reach.targets.begin(), reach.targets.end());
  return targets;
}

ResultTable run_torque_sweep(const ScenarioConfig& cfg) {
  const SymmetricSegmentParams& mech = cfg.mechanism.params;
  mech.validate();
  const TorqueSweepConfig& sweep = cfg.torque_sweep;
  if (sweep.sets.empty()) throw Error(ErrorCode::ConfigError, "torque_sweep.sets: empty");

  ResultTable table({"set", "q", "M", "dM_dq", "equilibrium", "stable"});
  add_mechanism_metadata(table, cfg, "torque_sweep");

  for (std::size_t s = 0; s < sweep.sets.size(); ++s) {
    const SweepSet& set = sweep.sets[s];
    const SegmentGeometry geom = SegmentGeometry::symmetric(set.a, mech.b);
    const SpringConfig springs{mech.k, mech.k, set.L0 - set.delta, set.L0 + set.delta};
    const double limit = admissible_limit(geom, mech.q_max);
    const Range range = checked_range(sweep.q_range, limit, "torque_sweep.q_range");

    std::vector<EquilibriumPoint> roots;
    try {
      EquilibriumOptions opts;
      opts.q_max = mech.q_max;
      roots = solve_equilibria(geom, springs, 0.0, opts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoEquilibrium) throw;
    }

    // Each root in the sweep range marks its nearest sample.
    std::vector<int> flag(sweep.samples, 0);
    std::vector<int> stable(sweep.samples, 0);
    std::size_t in_range = 0;
    for (const EquilibriumPoint& root : roots) {
      if (root.q < range.lo || root.q > range.hi) continue;
      ++in_range;
      const double pos = (root.q - range.lo) / (range.hi - range.lo) * (sweep.samples - 1);
      const int j = std::clamp(static_cast<int>(std::lround(pos)), 0, sweep.samples - 1);
      flag[j] = 1;
      stable[j] = root.stable ? 1 : 0;
    }
    std::ostringstream desc;
    desc << set.label << " a=" << format_number(set.a) << " L0=" << format_number(set.L0)
         << " delta=" << format_number(set.delta)
         << " margin=" << format_number(monotonicity_margin(set.a, mech.b, set.L0))
         << " equilibria=" << in_range;
    table.add_metadata("set." + std::to_string(s), desc.str());

    for (int j = 0; j < sweep.samples; ++j) {
      const double q = sample(range, j, sweep.samples);
      ResultRow row;
      row.values = {static_cast<double>(s), q, joint_torque(geom, springs, q),
                    torque_slope(geom, springs, q), static_cast<double>(flag[j]),
                    static_cast<double>(stable[j])};
      table.add_row(std::move(row));
    }
  }
  return table;
}

ResultTable run_control_map(const ScenarioConfig& cfg) {
  const SymmetricSegmentParams& p = cfg.mechanism.params;
  p.validate();
  const ControlMapConfig& map = cfg.control_map;
  const Range range = checked_range(map.q_range, p.joint_limit(), "control_map.q_range");

  std::vector<std::string> cols = {"q", "delta"};
  for (std::size_t i = 0; i < map.loads.size(); ++i) cols.push_back("delta_load" + std::to_string(i));
  ResultTable table(cols);
  add_mechanism_metadata(table, cfg, "control_map");
  for (std::size_t i = 0; i < map.loads.size(); ++i) {
    table.add_metadata("load" + std::to_string(i), format_number(map.loads[i]));
  }
  table.add_metadata("load_convention", "spring-side torque; solver external torque is -load");

  for (int j = 0; j < map.samples; ++j) {
    const double q = sample(range, j, map.samples);
    ResultRow row;
    row.values.assign(cols.size(), std::nullopt);
    row.values[0] = q;
    const auto fill = [&](std::size_t col, double m_ext) {
      try {
        row.values[col] = loaded_control(p, q, m_ext).delta;
      } catch (const Error& e) {
        if (row.status == "ok") row.status = std::string(to_string(e.code()));
      }
    };
    fill(1, 0.0);
    for (std::size_t i = 0; i < map.loads.size(); ++i) fill(2 + i, map.loads[i]);
    table.add_row(std::move(row));
  }
  return table;
}

ResultTable run_reach(const ScenarioConfig& cfg) { return run_reach_impl(cfg, false); }

ResultTable run_loaded_reach(const ScenarioConfig& cfg) { return run_reach_impl(cfg, true); }

ResultTable run_scenario(const std::string& name, const ScenarioConfig& cfg) {
  if (name == "torque_sweep") return run_torque_sweep(cfg);
  if (name == "control_map") return run_control_map(cfg);
  if (name == "reach") return run_reach(cfg);
  if (name == "loaded_reach") return run_loaded_reach(cfg);
  throw Error(ErrorCode::ConfigError, "unknown scenario '" + name + "'");
}

}  // namespace dualtri
