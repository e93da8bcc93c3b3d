// qfcs: run, sweep and validate counting-statistics scenarios.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qfcs/error.hpp"
#include "qfcs/output.hpp"
#include "qfcs/runner.hpp"
#include "qfcs/scenario.hpp"

namespace {

using qfcs::Scenario;

struct Overrides {
  std::optional<double> lambda_max;
  std::optional<int> lambda_points;
  std::optional<int> steps;
  std::optional<double> tol_report;
  std::optional<double> alpha;
  std::optional<double> xi;
  std::optional<double> dE;
  std::optional<std::string> preset;
  std::optional<double> g;
  std::optional<double> temperature;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--lambda-max", o.lambda_max, "Largest |lambda| on the counting grid");
  cmd->add_option("--lambda-points", o.lambda_points, "Number of grid points (odd)");
  cmd->add_option("--steps", o.steps, "Time steps (drive.steps, or paths.steps for paths-check)");
  cmd->add_option("--tol-report", o.tol_report, "Tolerance for the identity checks");
  cmd->add_option("--alpha", o.alpha, "cyclic.alpha");
  cmd->add_option("--xi", o.xi, "cyclic.xi");
  cmd->add_option("--dE", o.dE, "cyclic.dE");
  cmd->add_option("--preset", o.preset, "environment.preset");
  cmd->add_option("--g", o.g, "environment.g");
  cmd->add_option("--T", o.temperature, "Bath temperature (environment or decoherence)");
  cmd->add_option("--seed", o.seed, "Seed for random drives and states");
  cmd->add_option("--set", o.sets, "Numeric override PATH=VALUE (repeatable)");
}

Scenario resolve_scenario(const std::string& source) {
  try {
    return qfcs::default_scenario(qfcs::parse_kind(source));
  } catch (const qfcs::ValidationError&) {
    return qfcs::load_scenario_file(source);
  }
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw qfcs::ValidationError(what + ": '" + text + "' is not a number");
}

Scenario apply(Scenario s, const Overrides& o) {
  if (o.lambda_max) s = qfcs::with_override(s, "grid.lambda_max", *o.lambda_max);
  if (o.lambda_points) s = qfcs::with_override(s, "grid.points", *o.lambda_points);
  if (o.steps) {
    s = qfcs::with_override(s, s.kind == qfcs::ScenarioKind::paths_check ? "paths.steps" : "drive.steps",
                            *o.steps);
  }
  if (o.tol_report) s = qfcs::with_override(s, "tolerances.identity", *o.tol_report);
  if (o.alpha) s = qfcs::with_override(s, "cyclic.alpha", *o.alpha);
  if (o.xi) s = qfcs::with_override(s, "cyclic.xi", *o.xi);
  if (o.dE) s = qfcs::with_override(s, "cyclic.dE", *o.dE);
  if (o.preset) {
    qfcs::Json doc = qfcs::resolved(s);
    doc["environment"]["preset"] = *o.preset;
    s = qfcs::parse_scenario(doc);
  }
  if (o.g) s = qfcs::with_override(s, "environment.g", *o.g);
  if (o.temperature) {
    s = qfcs::with_override(s,
                            s.kind == qfcs::ScenarioKind::fast_decoherence ? "decoherence.temperature"
                                                                           : "environment.temperature",
                            *o.temperature);
  }
  if (o.seed) {
    qfcs::Json doc = qfcs::resolved(s);
    doc["seed"] = *o.seed;
    s = qfcs::parse_scenario(doc);
  }
  for (const auto& item : o.sets) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw qfcs::ValidationError("--set: expected PATH=VALUE, got '" + item + "'");
    s = qfcs::with_override(s, item.substr(0, eq), parse_number(item.substr(eq + 1), "--set " + item.substr(0, eq)));
  }
  return s;
}

std::vector<double> parse_values(const std::string& values, const std::string& linspace) {
  std::vector<double> out;
  if (!values.empty()) {
    std::stringstream ss(values);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) out.push_back(parse_number(item, "--values"));
    }
  }
  if (!linspace.empty()) {
    std::vector<std::string> parts;
    std::stringstream ss(linspace);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw qfcs::ValidationError("--linspace: expected START:STOP:COUNT");
    const double a = parse_number(parts[0], "--linspace start");
    const double b = parse_number(parts[1], "--linspace stop");
    const double n = parse_number(parts[2], "--linspace count");
    if (n < 1 || n != static_cast<int>(n)) throw qfcs::ValidationError("--linspace: COUNT must be a positive integer");
    const int count = static_cast<int>(n);
    for (int i = 0; i < count; ++i) out.push_back(count == 1 ? a : a + (b - a) * i / (count - 1));
  }
  if (out.empty()) throw qfcs::ValidationError("sweep: give --values or --linspace");
  return out;
}

std::string output_dir(const Scenario& s, const std::string& flag) {
  return qfcs::resolve_output_dir(flag.empty() ? s.output.dir : flag);
}

void print_failures(const qfcs::RunResult& r, const std::string& label) {
  for (const auto& c : r.checks) {
    if (!c.passed) {
      std::fprintf(stderr, "check failed%s: %s = %.3e (tolerance %.3e)\n", label.c_str(), c.name.c_str(), c.value,
                   c.tolerance);
    }
  }
}

void print_summary(const qfcs::RunResult& r) {
  std::printf("%s [%s]\n", r.scenario.name.c_str(), qfcs::to_string(r.scenario.kind).c_str());
  for (auto it = r.headline.begin(); it != r.headline.end(); ++it) {
    if (!it.value().is_null()) std::printf("  %-18s %s\n", it.key().c_str(), it.value().dump().c_str());
  }
  int passed = 0;
  for (const auto& c : r.checks) passed += c.passed ? 1 : 0;
  std::printf("  checks             %d/%zu passed\n", passed, r.checks.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full counting statistics of work and heat for driven quantum systems"};
  app.require_subcommand(1);

  std::string source;
  std::string out_dir;
  std::string format;
  Overrides overrides;

  auto* run = app.add_subcommand("run", "Run one scenario (file or built-in kind) and write its outputs");
  run->add_option("scenario", source, "Scenario file or kind name")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--format", format, "csv | json | both")->check(CLI::IsMember({"csv", "json", "both"}));
  add_override_flags(run, overrides);

  std::string parameter;
  std::string values;
  std::string linspace;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario over values of one numeric field");
  sweep->add_option("scenario", source, "Scenario file or kind name")->required();
  sweep->add_option("--param", parameter, "Dotted field to vary, e.g. cyclic.alpha")->required();
  sweep->add_option("--values", values, "Comma-separated values");
  sweep->add_option("--linspace", linspace, "START:STOP:COUNT");
  sweep->add_option("--threads", threads, "Worker threads (0: all cores)");
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--format", format, "csv | json | both")->check(CLI::IsMember({"csv", "json", "both"}));
  add_override_flags(sweep, overrides);

  auto* validate = app.add_subcommand("validate", "Parse a scenario and print its resolved form");
  validate->add_option("scenario", source, "Scenario file or kind name")->required();

  auto* presets = app.add_subcommand("presets", "List scenario kinds, drive protocols and environments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (presets->parsed()) {
      std::printf("kinds:");
      for (const auto& k : qfcs::scenario_kind_names()) std::printf(" %s", k.c_str());
      std::printf("\ndrive protocols:\n");
      for (const auto& [name, params] : qfcs::drive_protocol_defaults()) {
        std::printf("  %s", name.c_str());
        for (const auto& [key, v] : params) std::printf(" %s=%g", key.c_str(), v);
        std::printf("\n");
      }
      std::printf("environments:");
      for (const auto& n : qfcs::environment_preset_names()) std::printf(" %s", n.c_str());
      std::printf("\n");
      return 0;
    }

    if (validate->parsed()) {
      const Scenario s = resolve_scenario(source);
      std::cout << qfcs::resolved(s).dump(2) << "\n";
      return 0;
    }

    Scenario s = apply(resolve_scenario(source), overrides);
    if (!format.empty()) {
      qfcs::Json doc = qfcs::resolved(s);
      doc["output"]["format"] = format;
      s = qfcs::parse_scenario(doc);
    }
    const std::string dir = output_dir(s, out_dir);

    if (run->parsed()) {
      const qfcs::RunResult r = qfcs::run_scenario(s);
      const auto files = qfcs::write_run(r, dir, s.output.format);
      print_summary(r);
      for (const auto& f : files) std::printf("  wrote %s\n", f.c_str());
      if (!r.passed()) {
        print_failures(r, "");
        return 3;
      }
      return 0;
    }

    const qfcs::SweepResult sw = qfcs::run_sweep(s, parameter, parse_values(values, linspace), threads);
    const auto files = qfcs::write_sweep(sw, dir, s.output.format);
    std::printf("%s: %zu runs over %s\n", s.name.c_str(), sw.runs.size(), parameter.c_str());
    for (const auto& f : files) std::printf("  wrote %s\n", f.c_str());
    if (!sw.passed()) {
      for (std::size_t i = 0; i < sw.runs.size(); ++i) {
        print_failures(sw.runs[i], " (" + parameter + " = " + std::to_string(sw.values[i]) + ")");
      }
      return 3;
    }
    return 0;
  } catch (const qfcs::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const qfcs::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  }
}
