#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "gaussito/gaussproc.hpp"

namespace gaussito {

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

/// Parses {"horizon", "hurst", "jumps": [[t, var], ...], "coupling", "s0"};
/// missing keys keep their defaults. Throws ConfigError with the JSON path
/// of the first offending key.
ModelParams parse_model_params(const std::string& json_text);

struct RunOptions {
  std::optional<std::string> out_dir;  // overrides the scenario and environment
  std::optional<std::uint64_t> seed;   // overrides mc.seed
  unsigned jobs = 1;
  /// Directory that relative output paths in the scenario resolve against.
  std::string base_dir = ".";
};

struct RunResult {
  int exit_code = 0;  // 0 all pass, 1 any failure
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::string report_json;
  std::string csv;
  std::string summary;  // human-readable, one line per case plus totals
  std::string report_path;
  std::string csv_path;
};

/// Validates and runs a scenario given as JSON text. Throws ConfigError
/// (listing every schema violation with its path) before any case runs.
/// Writes the report and CSV only when `write_files` is set.
RunResult run_scenario(const std::string& json_text, const RunOptions& options,
                       bool write_files = true);

/// Reads the file and runs it; relative output paths resolve against the
/// file's directory unless options.base_dir is set explicitly.
RunResult run_scenario_file(const std::string& path, RunOptions options);

/// Human-readable model registry.
std::string catalog_text();

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace gaussito
