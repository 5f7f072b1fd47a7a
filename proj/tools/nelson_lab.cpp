#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "lab/config.hpp"
#include "lab/output.hpp"
#include "lab/scenarios.hpp"
#include "nelson/types.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kValidationFailure = 2;
constexpr int kThresholdFailure = 3;

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& scenario, const std::string& config_path, const std::string& out_override,
        const std::optional<std::uint64_t>& seed) {
  lab::Config config = lab::load_config(config_path);
  if (seed) config.run.seed = *seed;
  const std::filesystem::path out_dir =
      out_override.empty() ? std::filesystem::path(config.run.out) / scenario : std::filesystem::path(out_override);

  const auto start = std::chrono::steady_clock::now();
  lab::ScenarioResult result = lab::run_scenario(scenario, config);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::filesystem::create_directories(out_dir);
  const nlohmann::json effective = lab::to_json(config);
  nlohmann::json summary = {{"scenario", scenario}, {"config", effective}, {"results", result.summary}};

  nlohmann::json files = nlohmann::json::array();
  files.push_back(lab::write_file(out_dir, "summary.json", summary.dump(2) + "\n"));
  for (const lab::Table& t : result.tables) files.push_back(lab::write_file(out_dir, t.name + ".csv", lab::to_csv(t)));

  const nlohmann::json manifest = {{"scenario", scenario},
                                   {"seed", config.run.seed},
                                   {"config_path", config_path},
                                   {"config_file_sha256", lab::sha256_hex(read_bytes(config_path))},
                                   {"effective_config_sha256", lab::sha256_hex(effective.dump())},
                                   {"versions", lab::versions()},
                                   {"wall_time_seconds", wall},
                                   {"files", files}};
  lab::write_file(out_dir, "manifest.json", manifest.dump(2) + "\n");

  for (const lab::Check& c : result.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << lab::fmt(c.value)
              << " limit=" << lab::fmt(c.limit) << "\n";
  }
  std::cout << "outputs: " << out_dir.string() << "\n";
  return result.passed() ? kOk : kThresholdFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the Nelson model classical limit"};
  app.require_subcommand(1);

  std::string scenario, config_path, out_dir;
  std::uint64_t seed_value = 0;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a scenario and write summary, CSV tables and manifest");
  run_cmd->add_option("scenario", scenario, "Scenario name")
      ->required()
      ->check(CLI::IsMember(lab::scenario_names()));
  run_cmd->add_option("--config", config_path, "Configuration file (JSON)")->required();
  run_cmd->add_option("--out", out_dir, "Output directory, default <run.out>/<scenario>");
  CLI::Option* seed_opt = run_cmd->add_option("--seed", seed_value, "Overrides run.seed");

  std::string validate_path;
  CLI::App* validate_cmd = app.add_subcommand("validate", "Check a configuration file and exit");
  validate_cmd->add_option("--config", validate_path, "Configuration file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidationFailure;
  }

  try {
    if (*validate_cmd) {
      lab::load_config(validate_path);
      std::cout << "OK " << validate_path << "\n";
      return kOk;
    }
    std::optional<std::uint64_t> seed;
    if (*seed_opt) seed = seed_value;
    return run(scenario, config_path, out_dir, seed);
  } catch (const nelson::ConfigInvalid& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
