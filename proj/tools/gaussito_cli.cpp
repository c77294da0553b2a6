// Command-line front end over the C API.
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gaussito/gaussito.h"

namespace {

constexpr int kExitConfig = 2;

int run_command(const std::string& scenario, const std::string& out_dir, bool has_seed,
                std::uint64_t seed, unsigned jobs) {
  gaussito_run* run = nullptr;
  const gaussito_status st = gaussito_scenario_run(scenario.c_str(),
                                                   out_dir.empty() ? nullptr : out_dir.c_str(),
                                                   has_seed ? 1 : 0, seed, jobs, &run);
  if (st != GAUSSITO_OK) {
    std::cerr << "error: " << gaussito_last_error_message() << "\n";
    return kExitConfig;
  }
  std::cout << gaussito_run_summary(run) << "report: " << gaussito_run_report_path(run) << "\n";
  const int code = gaussito_run_exit_code(run);
  gaussito_run_destroy(run);
  return code;
}

int list_catalog() {
  std::size_t needed = 0;
  if (gaussito_catalog_text(nullptr, 0, &needed) != GAUSSITO_OK) return 1;
  std::vector<char> buf(needed);
  gaussito_catalog_text(buf.data(), buf.size(), &needed);
  std::cout << buf.data();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaussito - Ito formula verification for Gaussian processes with jumps"};
  app.require_subcommand(0, 1);

  std::string scenario, out_dir;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  auto* run = app.add_subcommand("run", "Run a scenario file and write JSON and CSV reports");
  run->add_option("scenario", scenario, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides GAUSSITO_OUT_DIR)");
  auto* seed_opt = run->add_option("--seed", seed, "Monte Carlo base seed");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list-catalog", "List model ids and parameters");
  auto* version = app.add_subcommand("version", "Print the library version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (run->parsed()) return run_command(scenario, out_dir, seed_opt->count() > 0, seed, jobs);
  if (list->parsed()) return list_catalog();
  if (version->parsed()) {
    std::cout << gaussito_version() << "\n";
    return 0;
  }
  std::cerr << app.help();
  return kExitConfig;
}
