#pragma once

// Declarative run description. Scenario files are YAML; internally the
// resolved scenario round-trips through JSON so that every output can echo
// the full configuration and sweeps can override single scalar fields.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "qfcs/cyclic_example.hpp"
#include "qfcs/drive.hpp"
#include "qfcs/linalg.hpp"
#include "qfcs/open_system.hpp"
#include "qfcs/paths.hpp"

namespace qfcs {

using Json = nlohmann::json;

enum class ScenarioKind { closed, tmp_compare, open, fast_decoherence, cyclic_example, paths_check };

std::string to_string(ScenarioKind kind);
ScenarioKind parse_kind(const std::string& name);
std::vector<std::string> scenario_kind_names();

struct DriveSpec {
  std::string protocol = "rabi";
  double duration = 1.0;
  int steps = 0;  // 0: choose automatically
  std::map<std::string, double> params;
};

struct StateSpec {
  std::string type = "eigenstate";
  int index = 0;
  std::vector<Complex> amplitudes;
  std::vector<double> populations;
  double temperature = 1.0;
  bool dephase = false;
};

struct GridSpec {
  double lambda_max = 3.0;
  int points = 61;
};

struct EnvironmentSpec {
  std::string preset = "qubit-exchange";
  double frequency = 2.0;
  int levels = 4;
  double g = 0.05;
  double temperature = 1.0;
  int refresh_interval = 0;
  std::string state = "gibbs";
  bool duality = false;
};

struct CyclicSpec {
  double alpha = 1.0471975511965976;
  double xi = 0.6283185307179586;
  double dE = 1.0;
  double duration = 1.0;
};

struct DecoherenceSpec {
  double temperature = 1.0;
};

struct PathsSpec {
  int steps = 4;
  std::string convention = "terminal";
  double lambda = 0.3;
  double weight = 1.0;
  double obs_x = 1.0;
  double obs_y = 0.0;
  double obs_z = 0.0;
};

struct OutputSpec {
  std::string dir;  // empty: command line, QFCS_OUT_DIR, then ./qfcs-out
  std::string format = "both";
  std::string prefix;  // empty: the scenario name
};

struct ToleranceSpec {
  double identity = 1e-10;
  double normalization = 1e-12;
  double hermiticity = 1e-10;
  double fd_relative = 1e-6;
  double cgf_moment = 1e-7;
};

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::closed;
  std::uint64_t seed = 1;
  DriveSpec drive;
  StateSpec state;
  GridSpec grid;
  EnvironmentSpec environment;
  CyclicSpec cyclic;
  DecoherenceSpec decoherence;
  PathsSpec paths;
  OutputSpec output;
  ToleranceSpec tolerances;
  int max_moment = 4;
};

/// Parses a scenario from its JSON form. Unknown keys, wrong types and
/// out-of-range values throw ValidationError naming the field.
Scenario parse_scenario(const Json& doc);
Scenario load_scenario_file(const std::string& path);
Json yaml_text_to_json(const std::string& text);

/// Every field with defaults filled in; parse_scenario(resolved(s)) == s.
Json resolved(const Scenario& s);

/// Built-in scenario for a kind, used when `run` gets a kind name.
Scenario default_scenario(ScenarioKind kind);

/// Sets the scalar at a dotted path ("cyclic.alpha", "drive.params.omega0")
/// in the resolved form and re-parses. Throws ValidationError when the path
/// does not name an existing scalar.
Scenario with_override(const Scenario& s, const std::string& dotted_path, double value);

/// Default parameters of each built-in drive protocol.
const std::map<std::string, std::map<std::string, double>>& drive_protocol_defaults();

// Builders used by the runner.
DriveProtocol build_protocol(const Scenario& s);
DiscretizedDrive build_drive(const Scenario& s);
DensityOperator build_state(const Scenario& s, const DiscretizedDrive& d);
CountingGrid build_grid(const Scenario& s);
CyclicExampleParams cyclic_params(const Scenario& s);

}  // namespace qfcs
