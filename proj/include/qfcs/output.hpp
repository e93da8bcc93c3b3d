#pragma once

#include <string>
#include <vector>

#include "qfcs/runner.hpp"

namespace qfcs {

/// ISO-8601 UTC time of the call.
std::string utc_timestamp();

/// "# key = value" lines for every leaf of the resolved configuration.
std::vector<std::string> config_header(const Json& config);

std::string to_csv(const Table& table, const Json& config);

/// Output directory: explicit value, else QFCS_OUT_DIR, else "qfcs-out".
std::string resolve_output_dir(const std::string& explicit_dir);

/// Writes <prefix>_report.json (always) and one <prefix>_<table>.csv per
/// table when the format includes csv. Returns the paths written.
std::vector<std::string> write_run(const RunResult& result, const std::string& dir, const std::string& format);

/// Writes <prefix>_sweep.json and <prefix>_sweep.csv.
std::vector<std::string> write_sweep(const SweepResult& sweep, const std::string& dir, const std::string& format);

}  // namespace qfcs
