// Command-line front end: parse a scenario file, run one subcommand, emit
// deterministic CSV or text artifacts.
//
// Exit codes: 0 all checks pass, 1 a model-level violation was flagged,
// 2 usage or scenario parse error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cryosim/runner.hpp"
#include "cryosim/scenario.hpp"

namespace {

int run(const std::string& command, const std::string& scenario_path, std::string out_dir,
        std::string format, std::uint64_t seed) {
  std::ifstream in(scenario_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open scenario file '" << scenario_path << "'\n";
    return 2;
  }
  std::ostringstream buf;
  buf << in.rdbuf();

  const cryosim::ParseResult parsed =
      cryosim::parse_scenario(buf.str(), std::filesystem::path(scenario_path).filename().string());
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors)
      std::cerr << scenario_path << ":" << e.line << ": " << e.message << "\n";
    return 2;
  }

  if (out_dir.empty()) out_dir = parsed.scenario.outputs.dir;
  if (format.empty()) format = parsed.scenario.outputs.format;

  try {
    const cryosim::CommandResult result = cryosim::run_command(parsed.scenario, command, seed);
    const auto paths = cryosim::emit_report(result, format, out_dir);
    for (const auto& line : result.summary) std::cout << line << "\n";
    for (const auto& p : paths) std::cout << "wrote " << p << "\n";
    return result.violation ? 1 : 0;
  } catch (const cryosim::missing_section& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    // Model-level faults (netlist faults, protocol misuse) surface here.
    std::cerr << "violation: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cryosim: hybrid cryogenic control electronics simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::string format;
  std::uint64_t seed = 1;

  const char* commands[] = {"plan", "sweep", "fridge", "grid", "pipeline", "controller", "simulate"};
  const char* help[] = {
      "adiabatic scaling schedule (worksheet table)",
      "per-gate power vs frequency curves for CMOS and 2LAL",
      "refrigeration multipliers and wall-plug totals per stage",
      "four-step control-grid update protocol transcript",
      "sequential store + mux chain throughput and latency",
      "configuration buffer rotation timing report",
      "switch-level circuit simulation (waveform + energy trace)",
  };
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i], help[i]);
    sub->add_option("scenario", scenario_path, "scenario file")->required();
    sub->add_option("--out", out_dir, "output directory (default from scenario)");
    sub->add_option("--format", format, "csv or text")
        ->check(CLI::IsMember({"csv", "text"}));
    sub->add_option("--seed", seed, "seed for randomized fixtures (model results are unaffected)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  return run(app.get_subcommands().front()->get_name(), scenario_path, out_dir, format, seed);
}
