#pragma once

#include <string>
#include <vector>

#include "qfcs/scenario.hpp"

namespace qfcs {

inline constexpr int kSchemaVersion = 1;

/// A raw artifact: one CSV file or one array under "data" in the JSON report.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct RunResult {
  Scenario scenario;
  /// Sweep-facing summary: first_moment, second_moment, heat, work,
  /// min_quasi_weight, tmp_average, duality_deviation (null when not
  /// applicable to the kind).
  Json headline;
  Json observations;
  std::vector<Check> checks;
  std::vector<Table> tables;

  bool passed() const;
  /// The report without timestamp; `data` embeds the tables when requested.
  Json report(bool embed_tables) const;
};

/// Runs one scenario. Pure: no files are written.
RunResult run_scenario(const Scenario& s);

struct SweepResult {
  Scenario base;
  std::string parameter;
  std::vector<double> values;
  std::vector<RunResult> runs;  // same order as values

  Table table() const;
  Json report() const;
  bool passed() const;
};

/// One run per value of the dotted scalar field, executed on up to
/// `threads` workers (0: hardware concurrency). Row order follows `values`.
SweepResult run_sweep(const Scenario& base, const std::string& parameter, const std::vector<double>& values,
                      unsigned threads = 0);

}  // namespace qfcs
