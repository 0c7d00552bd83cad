#include "dualtri/scenario_config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "dualtri/errors.hpp"

namespace dualtri {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& message) {
  throw Error(ErrorCode::ConfigError, where + ": " + message);
}

// A JSON object plus its dotted path, for error messages.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& item : node_.items()) {
      bool known = false;
      for (std::string_view k : keys) known = known || item.key() == k;
      if (!known) fail(field(item.key()), "unknown key");
    }
  }

  bool has(const char* key) const { return node_.contains(key); }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  Section child(const char* key) const { return {node_.at(key), field(key)}; }
  const json& raw(const char* key) const { return node_.at(key); }

  double number(const char* key) const {
    const json& v = node_.at(key);
    if (!v.is_number()) fail(field(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(field(key), "must be finite");
    return d;
  }

  double number_or(const char* key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  int integer_or(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) fail(field(key), "expected an integer");
    return v.get<int>();
  }

  std::string string_or(const char* key, std::string fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) fail(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key, std::size_t expected = 0) const {
    const json& v = node_.at(key);
    if (!v.is_array()) fail(field(key), "expected an array of numbers");
    if (expected != 0 && v.size() != expected) {
      fail(field(key), "expected " + std::to_string(expected) + " entries");
    }
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        fail(field(key), "entries must be finite numbers");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  Range range(const char* key) const {
    const auto v = numbers(key, 2);
    if (!(v[0] < v[1])) fail(field(key), "empty range, need lo < hi");
    return {v[0], v[1]};
  }

 private:
  const json& node_;
  std::string path_;
};

void require_positive(const Section& s, const char* key, double value) {
  if (!(value > 0.0)) fail(s.field(key), "must be positive");
}

int grid_count(const Section& s, const char* key, int fallback) {
  const int n = s.integer_or(key, fallback);
  if (n < 2) fail(s.field(key), "grid density must be >= 2");
  return n;
}

MechanismConfig parse_mechanism(const Section& s) {
  s.allow_only({"a", "b", "k", "L0", "q_max"});
  if (!s.has("a")) fail(s.field("a"), "required");
  if (!s.has("L0")) fail(s.field("L0"), "required");
  MechanismConfig m;
  m.dimensionless = !s.has("b") && !s.has("k");
  m.params.a = s.number("a");
  m.params.b = s.number_or("b", 1.0);
  m.params.k = s.number_or("k", 1.0);
  m.params.L0 = s.number("L0");
  m.params.q_max = s.number_or("q_max", kDefaultJointLimit);
  require_positive(s, "a", m.params.a);
  require_positive(s, "b", m.params.b);
  require_positive(s, "k", m.params.k);
  require_positive(s, "L0", m.params.L0);
  require_positive(s, "q_max", m.params.q_max);
  return m;
}

TorqueSweepConfig parse_torque_sweep(const Section& s, const MechanismConfig& mech) {
  s.allow_only({"q_range", "samples", "sets"});
  TorqueSweepConfig c;
  if (s.has("q_range")) c.q_range = s.range("q_range");
  c.samples = grid_count(s, "samples", c.samples);
  if (s.has("sets")) {
    const json& sets = s.raw("sets");
    if (!sets.is_array() || sets.empty()) fail(s.field("sets"), "expected a non-empty array");
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const Section set(sets[i], s.field("sets") + "[" + std::to_string(i) + "]");
      set.allow_only({"label", "a", "L0", "delta"});
      SweepSet entry;
      entry.label = set.string_or("label", "set" + std::to_string(i));
      entry.a = set.number_or("a", mech.params.a);
      entry.L0 = set.number_or("L0", mech.params.L0);
      entry.delta = set.number_or("delta", 0.0);
      require_positive(set, "a", entry.a);
      if (entry.L0 < 0.0) fail(set.field("L0"), "must be nonnegative");
      if (std::abs(entry.delta) > entry.L0) fail(set.field("delta"), "|delta| must not exceed L0");
      c.sets.push_back(entry);
    }
  } else {
    c.sets.push_back({"mechanism", mech.params.a, mech.params.L0, 0.0});
  }
  return c;
}

ControlMapConfig parse_control_map(const Section& s) {
  s.allow_only({"q_range", "samples", "loads"});
  ControlMapConfig c;
  if (s.has("q_range")) c.q_range = s.range("q_range");
  c.samples = grid_count(s, "samples", c.samples);
  if (s.has("loads")) c.loads = s.numbers("loads");
  return c;
}

Objective parse_objective(const Section& s) {
  const std::string name = s.string_or("objective", "min_sum");
  if (name == "min_sum") return Objective::MinSum;
  if (name == "min_max") return Objective::MinMax;
  if (name == "least_squares") return Objective::LeastSquares;
  fail(s.field("objective"), "expected min_sum, min_max or least_squares, got '" + name + "'");
}

ReachConfig parse_reach(const Section& s, bool loaded) {
  if (loaded) {
    s.allow_only({"q0", "objective", "grid", "targets", "tolerance", "scan_samples",
                  "max_iterations", "load"});
  } else {
    s.allow_only({"q0", "objective", "grid", "targets", "tolerance", "scan_samples",
                  "max_iterations"});
  }
  ReachConfig c;
  if (s.has("q0")) {
    const auto q = s.numbers("q0", 3);
    c.q0 = {q[0], q[1], q[2]};
  }
  c.objective = parse_objective(s);
  if (s.has("grid")) {
    const Section g = s.child("grid");
    g.allow_only({"dx", "dy", "nx", "ny"});
    GridSpec grid;
    if (g.has("dx")) grid.dx = g.range("dx");
    if (g.has("dy")) grid.dy = g.range("dy");
    grid.nx = grid_count(g, "nx", grid.nx);
    grid.ny = grid_count(g, "ny", grid.ny);
    c.grid = grid;
  }
  if (s.has("targets")) {
    const json& targets = s.raw("targets");
    if (!targets.is_array()) fail(s.field("targets"), "expected an array of [x, y] pairs");
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const json& t = targets[i];
      const std::string where = s.field("targets") + "[" + std::to_string(i) + "]";
      if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_number()) {
        fail(where, "expected [x, y]");
      }
      c.targets.push_back({t[0].get<double>(), t[1].get<double>()});
    }
  }
  if (!c.grid && c.targets.empty()) c.grid = GridSpec{};
  c.plan.tolerance = s.number_or("tolerance", c.plan.tolerance);
  require_positive(s, "tolerance", c.plan.tolerance);
  c.plan.scan_samples = grid_count(s, "scan_samples", c.plan.scan_samples);
  c.plan.max_iterations = s.integer_or("max_iterations", c.plan.max_iterations);
  if (c.plan.max_iterations < 1) fail(s.field("max_iterations"), "must be >= 1");
  if (loaded && s.has("load")) {
    const Section l = s.child("load");
    l.allow_only({"fx", "fy", "m_end"});
    c.load.fx = l.number_or("fx", 0.0);
    c.load.fy = l.number_or("fy", 0.0);
    c.load.m_ext_end = l.number_or("m_end", 0.0);
  }
  return c;
}

}  // namespace

const char* objective_name(Objective objective) {
  switch (objective) {
    case Objective::MinSum: return "min_sum";
    case Objective::MinMax: return "min_max";
    case Objective::LeastSquares: return "least_squares";
  }
  return "unknown";
}

ScenarioConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed JSON: ") + e.what());
  }
  const Section top(root, "");
  top.allow_only({"scenario", "mechanism", "torque_sweep", "control_map", "reach",
                  "loaded_reach", "output", "threads"});

  ScenarioConfig cfg;
  cfg.scenario = top.string_or("scenario", "");
  if (!top.has("mechanism")) fail("mechanism", "required");
  cfg.mechanism = parse_mechanism(top.child("mechanism"));
  const json empty = json::object();
  cfg.torque_sweep = parse_torque_sweep(
      top.has("torque_sweep") ? top.child("torque_sweep") : Section(empty, "torque_sweep"),
      cfg.mechanism);
  cfg.control_map = parse_control_map(
      top.has("control_map") ? top.child("control_map") : Section(empty, "control_map"));
  cfg.reach = parse_reach(top.has("reach") ? top.child("reach") : Section(empty, "reach"), false);
  cfg.loaded_reach = parse_reach(
      top.has("loaded_reach") ? top.child("loaded_reach") : Section(empty, "loaded_reach"), true);
  if (top.has("output")) {
    const Section out = top.child("output");
    out.allow_only({"path", "format"});
    cfg.output.path = out.string_or("path", "");
    cfg.output.format = out.string_or("format", "csv");
    if (cfg.output.format != "csv" && cfg.output.format != "json") {
      fail(out.field("format"), "expected csv or json");
    }
  }
  cfg.threads = top.integer_or("threads", 1);
  if (cfg.threads < 1) fail("threads", "must be >= 1");
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace dualtri
