#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyson/configuration.hpp"

namespace dyson::cli {

enum class Command { Simulate, Density, Kernel, Correlate, Mgf, Verify, Conditions, Truncation };

struct RunConfig {
  Command command;
  std::optional<Configuration> xi;
  std::optional<InfiniteConfigSpec> spec;

  // Time parameters.
  double T = 1.0;
  double grid_step = 0.01;
  double t = 0.5;

  // Monte Carlo parameters.
  std::size_t n_paths = 100000;
  std::uint64_t seed = 0xD75054;
  int workers = 0;  // 0 = hardware concurrency

  // Quadrature parameters.
  std::size_t gh_order = 64;      // Q
  std::size_t nystrom_m = 200;    // m
  std::size_t contour_nodes = 256;  // N_c

  std::string out_prefix = "out";
  std::string build_id = "dev";

  nlohmann::json raw;  // full document, for command-specific fields
};

/// Validated config from a JSON document. Unknown commands, missing required
/// fields and non-positive numeric parameters raise ConfigError with the
/// offending field path.
RunConfig parse_config(const std::string& json_text);

/// Executes the command, writes artifacts under the output prefix and prints
/// a one-line summary. Returns the process exit status: 0 success,
/// 1 verification failure, 2 configuration error, 3 numerical breakdown.
int run(const RunConfig& cfg);

/// Convenience wrapper used by the executable: reads the file, splices the
/// positional command and overrides, runs, and maps every error to its exit
/// status (also writing <prefix>.error.json).
int run_from_file(const std::string& command, const std::string& config_path,
                  const std::optional<std::uint64_t>& seed_override,
                  const std::optional<int>& workers_override,
                  const std::optional<std::string>& out_override,
                  const std::optional<std::string>& build_id_override);

}  // namespace dyson::cli
