// dualtri_cli: scenario runner for the dual-triangle manipulator toolkit.
//
//   dualtri_cli list-scenarios
//   dualtri_cli validate --config cfg.json
//   dualtri_cli run <scenario> --config cfg.json [--out path] [--format csv|json]
//
// Exit codes: 0 success, 2 config error, 3 infeasible everywhere, 4 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dualtri/errors.hpp"
#include "dualtri/scenarios.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

// "-" and the empty path both mean stdout.
std::string resolve_output_path(const std::string& path) {
  if (path.empty() || path == "-") return {};
  const char* dir = std::getenv("DUALTRI_OUTPUT_DIR");
  const std::filesystem::path p(path);
  if (dir == nullptr || *dir == '\0' || p.is_absolute()) return path;
  return (std::filesystem::path(dir) / p).string();
}

int run(const std::string& scenario, const std::string& config_path, std::string out_path,
        std::string format) {
  dualtri::ScenarioConfig cfg = dualtri::load_config(config_path);
  const std::string name = scenario.empty() ? cfg.scenario : scenario;
  if (name.empty()) {
    throw dualtri::Error(dualtri::ErrorCode::ConfigError, "no scenario given on the command line or in the config");
  }
  if (out_path.empty()) out_path = cfg.output.path;
  if (format.empty()) format = cfg.output.format;

  const dualtri::ResultTable table = dualtri::run_scenario(name, cfg);

  const std::string target = resolve_output_path(out_path);
  std::ofstream file;
  if (!target.empty()) {
    file.open(target);
    if (!file) {
      throw dualtri::Error(dualtri::ErrorCode::ConfigError, "cannot write output file '" + target + "'");
    }
  }
  std::ostream& out = target.empty() ? std::cout : file;
  if (format == "json") {
    table.write_json(out);
  } else {
    table.write_csv(out);
  }

  const bool map_scenario = name == "reach" || name == "loaded_reach";
  if (map_scenario && !table.rows().empty() && table.count_status("ok") == 0 &&
      table.count_status("unstable") == 0) {
    std::cerr << "no feasible target in " << table.rows().size() << " rows\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinematic control toolkit for dual-triangle compliant manipulators"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list-scenarios", "List the available scenarios");

  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "Parse and check a scenario config");
  validate->add_option("--config", validate_config, "Config file (JSON)")->required();

  std::string scenario, config_path, out_path, format;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and emit its table");
  run_cmd->add_option("scenario", scenario, "Scenario name (defaults to the config's)");
  run_cmd->add_option("--config", config_path, "Config file (JSON)")->required();
  run_cmd->add_option("--out", out_path, "Output path (defaults to config, then stdout)");
  run_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*list) {
      for (const auto& info : dualtri::scenario_catalog()) {
        std::cout << info.name << "\t" << info.description << "\n";
      }
      return kExitOk;
    }
    if (*validate) {
      dualtri::load_config(validate_config);
      std::cout << "ok\n";
      return kExitOk;
    }
    return run(scenario, config_path, out_path, format);
  } catch (const dualtri::Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == dualtri::ErrorCode::ConfigError ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
