#include "qfcs/output.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qfcs/error.hpp"

namespace qfcs {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

void flatten(const Json& node, const std::string& prefix, std::vector<std::string>& out) {
  if (node.is_object() && !node.empty()) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
    return;
  }
  out.push_back("# " + prefix + " = " + (node.is_array() || node.is_object() ? node.dump() : scalar_text(node)));
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write output file '" + path.string() + "'");
  out << text;
  if (!out) throw ValidationError("failed while writing '" + path.string() + "'");
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + dir + "': " + ec.message());
  return std::filesystem::path(dir);
}

std::string prefix_of(const Scenario& s) {
  return s.output.prefix.empty() ? s.name : s.output.prefix;
}

}  // namespace

std::vector<std::string> config_header(const Json& config) {
  std::vector<std::string> lines{"# schema_version = " + std::to_string(kSchemaVersion)};
  flatten(config, "config", lines);
  return lines;
}

std::string to_csv(const Table& table, const Json& config) {
  std::ostringstream os;
  for (const auto& line : config_header(config)) os << line << "\n";
  os << "# table = " << table.name << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << scalar_text(row[c]);
    os << "\n";
  }
  return os.str();
}

std::string resolve_output_dir(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("QFCS_OUT_DIR"); env && *env) return env;
  return "qfcs-out";
}

std::vector<std::string> write_run(const RunResult& result, const std::string& dir, const std::string& format) {
  const bool csv = format == "csv" || format == "both";
  const bool json = format == "json" || format == "both";
  if (!csv && !json) throw ValidationError("--format: expected csv | json | both");
  const auto root = prepare_dir(dir);
  const std::string prefix = prefix_of(result.scenario);
  std::vector<std::string> written;
  Json report = result.report(json);
  report["generated_at"] = utc_timestamp();
  const auto report_path = root / (prefix + "_report.json");
  write_file(report_path, report.dump(2) + "\n");
  written.push_back(report_path.string());
  if (csv) {
    const Json config = resolved(result.scenario);
    for (const auto& t : result.tables) {
      const auto path = root / (prefix + "_" + t.name + ".csv");
      write_file(path, to_csv(t, config));
      written.push_back(path.string());
    }
  }
  return written;
}

std::vector<std::string> write_sweep(const SweepResult& sweep, const std::string& dir, const std::string& format) {
  const bool csv = format == "csv" || format == "both";
  const bool json = format == "json" || format == "both";
  if (!csv && !json) throw ValidationError("--format: expected csv | json | both");
  const auto root = prepare_dir(dir);
  const std::string prefix = prefix_of(sweep.base);
  std::vector<std::string> written;
  if (json) {
    Json report = sweep.report();
    report["generated_at"] = utc_timestamp();
    const auto path = root / (prefix + "_sweep.json");
    write_file(path, report.dump(2) + "\n");
    written.push_back(path.string());
  }
  if (csv) {
    Json config = resolved(sweep.base);
    config["sweep_parameter"] = sweep.parameter;
    const auto path = root / (prefix + "_sweep.csv");
    write_file(path, to_csv(sweep.table(), config));
    written.push_back(path.string());
  }
  return written;
}

}  // namespace qfcs
