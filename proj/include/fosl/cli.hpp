#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "fosl/config.hpp"
#include "fosl/harness.hpp"

namespace fosl {

inline constexpr const char* kVersion = "0.1.0";

/// Process exit codes of the CLI verbs.
enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_parse_error = 2, exit_runtime_error = 3 };

/// Name of the environment variable that overrides the output root.
inline constexpr const char* kOutputRootEnv = "FOSL_OUTPUT_ROOT";

/// Output directory of a run: experiment.output, placed under $FOSL_OUTPUT_ROOT
/// when that is set and the configured path is relative.
std::string resolve_output_dir(const ExperimentConfig& c);

/// Runs one check id against the configuration.
InequalityReport run_check(const std::string& id, const ExperimentConfig& c);

/// Executes every listed check in order, writing <id>.csv, <id>.json and
/// manifest.json. Returns an ExitCode; diagnostics go to `err`.
int run_experiment(const ExperimentConfig& c, std::ostream& log, std::ostream& err);
int run_config_file(const std::string& path, std::ostream& log, std::ostream& err);

/// Built-in domains, Young families, family kinds and check ids.
std::string list_catalog();

/// Decomposition of the configured domain at the finest resolution:
/// whitney.csv, whitney.svg (2-D) and whitney.json.
int whitney_dump(const std::string& config_path, std::ostream& log, std::ostream& err);

/// Luxemburg seminorm of a CSV-supplied function on the configured domain
/// (finest resolution); prints a JSON line.
int norm_command(const std::string& config_path, const std::string& input_csv, std::ostream& log,
                 std::ostream& err);

}  // namespace fosl
