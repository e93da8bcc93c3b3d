#include "qfcs/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "qfcs/error.hpp"
#include "qfcs/tmp.hpp"

namespace qfcs {

// ---------------------------------------------------------------------------
// Kinds

namespace {

const std::vector<std::pair<ScenarioKind, std::string>>& kind_table() {
  static const std::vector<std::pair<ScenarioKind, std::string>> t = {
      {ScenarioKind::closed, "closed"},
      {ScenarioKind::tmp_compare, "tmp-compare"},
      {ScenarioKind::open, "open"},
      {ScenarioKind::fast_decoherence, "fast-decoherence"},
      {ScenarioKind::cyclic_example, "cyclic-example"},
      {ScenarioKind::paths_check, "paths-check"},
  };
  return t;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  for (const auto& [k, n] : kind_table()) {
    if (k == kind) return n;
  }
  return "unknown";
}

ScenarioKind parse_kind(const std::string& name) {
  for (const auto& [k, n] : kind_table()) {
    if (n == name) return k;
  }
  std::ostringstream os;
  os << "kind: unknown scenario kind '" << name << "'; expected one of";
  for (const auto& [k, n] : kind_table()) os << " " << n;
  throw ValidationError(os.str());
}

std::vector<std::string> scenario_kind_names() {
  std::vector<std::string> out;
  for (const auto& [k, n] : kind_table()) out.push_back(n);
  return out;
}

const std::map<std::string, std::map<std::string, double>>& drive_protocol_defaults() {
  static const std::map<std::string, std::map<std::string, double>> d = {
      {"constant", {{"i", 0.0}, {"x", 0.0}, {"y", 0.0}, {"z", 1.0}}},
      {"linear-ramp",
       {{"start_x", 0.0}, {"start_y", 0.0}, {"start_z", 1.0}, {"end_x", 1.0}, {"end_y", 0.0}, {"end_z", 0.0}}},
      {"rabi", {{"omega0", 1.0}, {"amplitude", 0.5}, {"frequency", 1.0}}},
      {"gap-ramp", {{"gap_start", 1.0}, {"gap_end", 1.5}}},
      {"random", {{"dim", 2.0}, {"scale", 1.0}}},
      {"cyclic", {}},
      {"cyclic-piecewise", {{"edge_fraction", 0.25}}},
  };
  return d;
}

// ---------------------------------------------------------------------------
// Field reader with unknown-key detection

namespace {

class Reader {
 public:
  Reader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ValidationError(where() + ": expected a mapping");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  double number(const std::string& key, double fallback) {
    if (!take(key)) return fallback;
    const Json& v = node_.at(key);
    if (!v.is_number()) throw ValidationError(field(key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ValidationError(field(key) + ": must be finite");
    return x;
  }

  int integer(const std::string& key, int fallback) {
    if (!take(key)) return fallback;
    const Json& v = node_.at(key);
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (std::floor(x) == x && std::abs(x) < 1e9) return static_cast<int>(x);
    }
    throw ValidationError(field(key) + ": expected an integer");
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!take(key)) return fallback;
    const Json& v = node_.at(key);
    if (!v.is_string()) throw ValidationError(field(key) + ": expected a string");
    return v.get<std::string>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!take(key)) return fallback;
    const Json& v = node_.at(key);
    if (!v.is_boolean()) throw ValidationError(field(key) + ": expected true or false");
    return v.get<bool>();
  }

  const Json* raw(const std::string& key) {
    if (!take(key)) return nullptr;
    return &node_.at(key);
  }

  Reader child(const std::string& key) {
    static const Json empty = Json::object();
    if (!take(key)) return Reader(empty, field(key));
    return Reader(node_.at(key), field(key));
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) throw ValidationError(field(it.key()) + ": unknown key");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "scenario" : path_; }

 private:
  bool take(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key) && !node_.at(key).is_null();
  }

  const Json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ValidationError(field + ": " + message);
}

Complex parse_amplitude(const Json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ValidationError(field + ": amplitudes are numbers or [re, im] pairs");
}

}  // namespace

Scenario parse_scenario(const Json& doc) {
  Reader top(doc, "");
  Scenario s;
  s.kind = parse_kind(top.text("kind", "closed"));
  s.name = top.text("name", to_string(s.kind));
  require(!s.name.empty() && s.name.find('/') == std::string::npos, "name", "must be a non-empty file stem");
  {
    const int seed = top.integer("seed", 1);
    require(seed >= 0, "seed", "must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
  }
  s.max_moment = top.integer("max_moment", 4);
  require(s.max_moment >= 1 && s.max_moment <= 8, "max_moment", "must lie in [1, 8]");

  {
    Reader r = top.child("drive");
    s.drive.protocol = r.text("protocol", s.kind == ScenarioKind::cyclic_example ? "cyclic" : "rabi");
    const auto& table = drive_protocol_defaults();
    const auto it = table.find(s.drive.protocol);
    if (it == table.end()) {
      std::ostringstream os;
      os << "unknown protocol '" << s.drive.protocol << "'; expected one of";
      for (const auto& [n, p] : table) os << " " << n;
      throw ValidationError(r.field("protocol") + ": " + os.str());
    }
    s.drive.duration = r.number("duration", 1.0);
    require(s.drive.duration > 0.0, r.field("duration"), "must be positive");
    s.drive.steps = r.integer("steps", 0);
    require(s.drive.steps >= 0, r.field("steps"), "must be >= 0 (0 chooses automatically)");
    Reader p = r.child("params");
    for (const auto& [key, value] : it->second) s.drive.params[key] = p.number(key, value);
    p.finish();
    r.finish();
    if (s.drive.protocol == "random") {
      const double dim = s.drive.params.at("dim");
      require(dim >= 2 && dim <= 16 && std::floor(dim) == dim, "drive.params.dim", "must be an integer in [2, 16]");
    }
  }
  {
    Reader r = top.child("state");
    s.state.type = r.text("type", s.kind == ScenarioKind::cyclic_example ? "floquet" : "eigenstate");
    static const std::set<std::string> types = {"eigenstate", "superposition", "mixture", "gibbs",
                                                "floquet", "random", "maximally-mixed"};
    require(types.count(s.state.type) > 0, r.field("type"),
            "expected eigenstate | superposition | mixture | gibbs | floquet | random | maximally-mixed");
    s.state.index = r.integer("index", 0);
    require(s.state.index >= 0, r.field("index"), "must be >= 0");
    if (const Json* a = r.raw("amplitudes")) {
      require(a->is_array(), r.field("amplitudes"), "expected a list");
      for (const auto& v : *a) s.state.amplitudes.push_back(parse_amplitude(v, r.field("amplitudes")));
    }
    if (const Json* p = r.raw("populations")) {
      require(p->is_array(), r.field("populations"), "expected a list");
      for (const auto& v : *p) {
        require(v.is_number(), r.field("populations"), "expected numbers");
        s.state.populations.push_back(v.get<double>());
      }
    }
    s.state.temperature = r.number("temperature", 1.0);
    require(s.state.temperature > 0.0, r.field("temperature"), "must be positive");
    s.state.dephase = r.flag("dephase", false);
    r.finish();
    if (s.state.type == "superposition") {
      require(!s.state.amplitudes.empty(), "state.amplitudes", "required for a superposition");
    }
    if (s.state.type == "mixture") {
      require(!s.state.populations.empty(), "state.populations", "required for a mixture");
    }
  }
  {
    Reader r = top.child("grid");
    s.grid.lambda_max = r.number("lambda_max", 3.0);
    s.grid.points = r.integer("points", 61);
    require(s.grid.lambda_max > 0.0, r.field("lambda_max"), "must be positive");
    require(s.grid.points >= 3 && s.grid.points % 2 == 1, r.field("points"), "must be odd and >= 3");
    r.finish();
  }
  {
    Reader r = top.child("environment");
    s.environment.preset = r.text("preset", "qubit-exchange");
    const auto names = environment_preset_names();
    require(std::find(names.begin(), names.end(), s.environment.preset) != names.end(), r.field("preset"),
            "unknown environment preset '" + s.environment.preset + "'");
    s.environment.frequency = r.number("frequency", 2.0);
    s.environment.levels = r.integer("levels", 4);
    require(s.environment.levels >= 2 && s.environment.levels <= 8, r.field("levels"), "must lie in [2, 8]");
    s.environment.g = r.number("g", 0.05);
    s.environment.temperature = r.number("temperature", 1.0);
    require(s.environment.temperature > 0.0, r.field("temperature"), "must be positive");
    s.environment.refresh_interval = r.integer("refresh_interval", 0);
    require(s.environment.refresh_interval >= 0, r.field("refresh_interval"), "must be >= 0");
    s.environment.state = r.text("state", "gibbs");
    static const std::set<std::string> env_states = {"gibbs", "ground", "excited", "plus"};
    require(env_states.count(s.environment.state) > 0, r.field("state"),
            "expected gibbs | ground | excited | plus");
    s.environment.duality = r.flag("duality", false);
    r.finish();
  }
  {
    Reader r = top.child("cyclic");
    s.cyclic.alpha = r.number("alpha", s.cyclic.alpha);
    s.cyclic.xi = r.number("xi", s.cyclic.xi);
    s.cyclic.dE = r.number("dE", s.cyclic.dE);
    s.cyclic.duration = r.number("duration", 1.0);
    require(s.cyclic.dE > 0.0, r.field("dE"), "must be positive");
    require(s.cyclic.duration > 0.0, r.field("duration"), "must be positive");
    r.finish();
  }
  {
    Reader r = top.child("decoherence");
    s.decoherence.temperature = r.number("temperature", 1.0);
    require(s.decoherence.temperature > 0.0, r.field("temperature"), "must be positive");
    r.finish();
  }
  {
    Reader r = top.child("paths");
    s.paths.steps = r.integer("steps", 4);
    require(s.paths.steps >= 1 && s.paths.steps <= 18, r.field("steps"), "must lie in [1, 18]");
    s.paths.convention = r.text("convention", "terminal");
    parse_delta_convention(s.paths.convention);
    s.paths.lambda = r.number("lambda", 0.3);
    s.paths.weight = r.number("weight", 1.0);
    s.paths.obs_x = r.number("obs_x", 1.0);
    s.paths.obs_y = r.number("obs_y", 0.0);
    s.paths.obs_z = r.number("obs_z", 0.0);
    r.finish();
  }
  {
    Reader r = top.child("output");
    s.output.dir = r.text("dir", "");
    s.output.format = r.text("format", "both");
    require(s.output.format == "csv" || s.output.format == "json" || s.output.format == "both",
            r.field("format"), "expected csv | json | both");
    s.output.prefix = r.text("prefix", "");
    r.finish();
  }
  {
    Reader r = top.child("tolerances");
    ToleranceSpec& t = s.tolerances;
    t.identity = r.number("identity", t.identity);
    t.normalization = r.number("normalization", t.normalization);
    t.hermiticity = r.number("hermiticity", t.hermiticity);
    t.fd_relative = r.number("fd_relative", t.fd_relative);
    t.cgf_moment = r.number("cgf_moment", t.cgf_moment);
    for (double v : {t.identity, t.normalization, t.hermiticity, t.fd_relative, t.cgf_moment}) {
      require(v > 0.0, "tolerances", "all tolerances must be positive");
    }
    r.finish();
  }
  top.finish();
  return s;
}

// ---------------------------------------------------------------------------
// YAML loading

namespace {

Json yaml_to_json(const YAML::Node& n, const std::string& where) {
  switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      Json out = Json::array();
      for (std::size_t i = 0; i < n.size(); ++i) out.push_back(yaml_to_json(n[i], where + "[" + std::to_string(i) + "]"));
      return out;
    }
    case YAML::NodeType::Map: {
      Json out = Json::object();
      for (const auto& kv : n) {
        const std::string key = kv.first.as<std::string>();
        const std::string child = where.empty() ? key : where + "." + key;
        if (out.contains(key)) throw ValidationError(child + ": duplicate key");
        out[key] = yaml_to_json(kv.second, child);
      }
      return out;
    }
    case YAML::NodeType::Scalar: {
      const std::string text = n.Scalar();
      if (n.Tag() == "!") return text;  // quoted
      if (text == "true" || text == "false") return text == "true";
      int i = 0;
      if (YAML::convert<int>::decode(n, i)) return i;
      double d = 0.0;
      if (YAML::convert<double>::decode(n, d)) return d;
      return text;
    }
  }
  return nullptr;
}

}  // namespace

Json yaml_text_to_json(const std::string& text) {
  try {
    const YAML::Node root = YAML::Load(text);
    if (root.IsNull()) return Json::object();
    return yaml_to_json(root, "");
  } catch (const YAML::Exception& e) {
    throw ValidationError(std::string("scenario file is not valid YAML: ") + e.what());
  }
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(yaml_text_to_json(buf.str()));
}

// ---------------------------------------------------------------------------
// Resolved form and overrides

Json resolved(const Scenario& s) {
  Json j;
  j["name"] = s.name;
  j["kind"] = to_string(s.kind);
  j["seed"] = s.seed;
  j["max_moment"] = s.max_moment;
  j["drive"] = {{"protocol", s.drive.protocol},
                {"duration", s.drive.duration},
                {"steps", s.drive.steps},
                {"params", s.drive.params}};
  Json amps = Json::array();
  for (const auto& a : s.state.amplitudes) amps.push_back({a.real(), a.imag()});
  j["state"] = {{"type", s.state.type},
                {"index", s.state.index},
                {"amplitudes", amps},
                {"populations", s.state.populations},
                {"temperature", s.state.temperature},
                {"dephase", s.state.dephase}};
  j["grid"] = {{"lambda_max", s.grid.lambda_max}, {"points", s.grid.points}};
  j["environment"] = {{"preset", s.environment.preset},
                      {"frequency", s.environment.frequency},
                      {"levels", s.environment.levels},
                      {"g", s.environment.g},
                      {"temperature", s.environment.temperature},
                      {"refresh_interval", s.environment.refresh_interval},
                      {"state", s.environment.state},
                      {"duality", s.environment.duality}};
  j["cyclic"] = {{"alpha", s.cyclic.alpha}, {"xi", s.cyclic.xi}, {"dE", s.cyclic.dE},
                 {"duration", s.cyclic.duration}};
  j["decoherence"] = {{"temperature", s.decoherence.temperature}};
  j["paths"] = {{"steps", s.paths.steps},   {"convention", s.paths.convention},
                {"lambda", s.paths.lambda}, {"weight", s.paths.weight},
                {"obs_x", s.paths.obs_x},   {"obs_y", s.paths.obs_y},
                {"obs_z", s.paths.obs_z}};
  j["output"] = {{"dir", s.output.dir}, {"format", s.output.format}, {"prefix", s.output.prefix}};
  j["tolerances"] = {{"identity", s.tolerances.identity},
                     {"normalization", s.tolerances.normalization},
                     {"hermiticity", s.tolerances.hermiticity},
                     {"fd_relative", s.tolerances.fd_relative},
                     {"cgf_moment", s.tolerances.cgf_moment}};
  return j;
}

Scenario with_override(const Scenario& s, const std::string& dotted_path, double value) {
  Json doc = resolved(s);
  Json* node = &doc;
  std::stringstream parts(dotted_path);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (!node->is_object() || !node->contains(part)) {
      throw ValidationError("override '" + dotted_path + "': no such field");
    }
    node = &(*node)[part];
  }
  if (!node->is_number()) {
    throw ValidationError("override '" + dotted_path + "': not a scalar numeric field");
  }
  if (node->is_number_integer()) {
    if (std::floor(value) != value) {
      throw ValidationError("override '" + dotted_path + "': integer field needs an integer value");
    }
    *node = static_cast<long long>(value);
  } else {
    *node = value;
  }
  return parse_scenario(doc);
}

Scenario default_scenario(ScenarioKind kind) {
  Json doc = {{"kind", to_string(kind)}};
  switch (kind) {
    case ScenarioKind::closed:
      doc["drive"] = {{"protocol", "rabi"}, {"steps", 512}};
      doc["state"] = {{"type", "superposition"}, {"amplitudes", {0.6, 0.8}}};
      break;
    case ScenarioKind::tmp_compare:
      doc["drive"] = {{"protocol", "rabi"}, {"steps", 512}};
      doc["state"] = {{"type", "mixture"}, {"populations", {0.7, 0.3}}};
      break;
    case ScenarioKind::open:
      doc["drive"] = {{"protocol", "rabi"}, {"duration", 2.0}, {"steps", 200}};
      doc["state"] = {{"type", "eigenstate"}, {"index", 1}};
      break;
    case ScenarioKind::fast_decoherence:
      doc["drive"] = {{"protocol", "gap-ramp"}, {"steps", 512}};
      break;
    case ScenarioKind::cyclic_example:
      break;
    case ScenarioKind::paths_check:
      doc["drive"] = {{"protocol", "rabi"}};
      break;
  }
  return parse_scenario(doc);
}

// ---------------------------------------------------------------------------
// Builders

namespace {

Matrix random_hermitian(std::mt19937_64& rng, int dim, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(normal(rng), normal(rng));
  }
  return 0.5 * scale * (m + m.adjoint());
}

Matrix qubit(double i, double x, double y, double z) {
  return i * qfcs::identity(2) + x * pauli::x() + y * pauli::y() + z * pauli::z();
}

}  // namespace

CyclicExampleParams cyclic_params(const Scenario& s) {
  return {s.cyclic.alpha, s.cyclic.xi, s.cyclic.dE, s.cyclic.duration};
}

DriveProtocol build_protocol(const Scenario& s) {
  const auto& p = s.drive.params;
  const double T = s.drive.duration;
  const std::string& name = s.drive.protocol;
  if (name == "constant") {
    return DriveProtocol::constant(HermitianOperator(qubit(p.at("i"), p.at("x"), p.at("y"), p.at("z"))), T);
  }
  if (name == "linear-ramp") {
    return DriveProtocol::linear_ramp(
        HermitianOperator(qubit(0.0, p.at("start_x"), p.at("start_y"), p.at("start_z"))),
        HermitianOperator(qubit(0.0, p.at("end_x"), p.at("end_y"), p.at("end_z"))), T);
  }
  if (name == "rabi") return DriveProtocol::rabi(p.at("omega0"), p.at("amplitude"), p.at("frequency"), T);
  if (name == "gap-ramp") return DriveProtocol::gap_ramp(p.at("gap_start"), p.at("gap_end"), T);
  if (name == "random") {
    std::mt19937_64 rng(s.seed);
    const int dim = static_cast<int>(p.at("dim"));
    const double scale = p.at("scale");
    const Matrix a = random_hermitian(rng, dim, scale);
    const Matrix b = random_hermitian(rng, dim, scale);
    const Matrix c = random_hermitian(rng, dim, scale);
    return DriveProtocol("random", T, static_cast<std::size_t>(dim), [a, b, c](double t) {
      return HermitianOperator(Matrix(a + std::cos(2.0 * t) * b + t * c));
    });
  }
  if (name == "cyclic-piecewise") {
    CyclicExampleParams cp = cyclic_params(s);
    return cyclic_physical_protocol(cp, p.at("edge_fraction"));
  }
  throw ValidationError("drive.protocol: '" + name + "' has no continuous-time protocol");
}

DiscretizedDrive build_drive(const Scenario& s) {
  if (s.drive.protocol == "cyclic") return cyclic_drive(cyclic_params(s));
  const DriveProtocol p = build_protocol(s);
  if (s.drive.steps > 0) return discretize(p, s.drive.steps);
  const StepChoice choice = choose_step_count(p, 1e-6, 1, 1 << 18);
  if (!choice.converged) {
    std::ostringstream os;
    os << "drive: automatic step selection did not reach 1e-6 by N = " << choice.steps
       << " (estimate " << choice.estimate << "); set drive.steps";
    throw NumericalError(os.str());
  }
  return discretize(p, choice.steps);
}

DensityOperator build_state(const Scenario& s, const DiscretizedDrive& d) {
  const EigenSystem eig = eig_hermitian(d.initial_hamiltonian());
  const Matrix& v = eig.vectors.matrix();
  const auto dim = static_cast<int>(d.dim());
  const StateSpec& st = s.state;
  auto basis_vector = [&](const std::vector<Complex>& c) {
    if (static_cast<int>(c.size()) != dim) {
      std::ostringstream os;
      os << "state: expected " << dim << " entries, got " << c.size();
      throw ValidationError(os.str());
    }
    Vector a(dim);
    for (int i = 0; i < dim; ++i) a(i) = c[static_cast<std::size_t>(i)];
    return Vector(v * a);
  };
  DensityOperator rho = DensityOperator::maximally_mixed(d.dim());
  if (st.type == "eigenstate") {
    if (st.index >= dim) throw ValidationError("state.index: out of range for dimension " + std::to_string(dim));
    rho = DensityOperator::pure(v.col(st.index));
  } else if (st.type == "superposition") {
    rho = DensityOperator::pure(basis_vector(st.amplitudes));
  } else if (st.type == "mixture") {
    if (static_cast<int>(st.populations.size()) != dim) {
      throw ValidationError("state.populations: expected " + std::to_string(dim) + " entries");
    }
    double total = 0.0;
    for (double p : st.populations) {
      if (p < 0.0) throw ValidationError("state.populations: must be nonnegative");
      total += p;
    }
    if (!(total > 0.0)) throw ValidationError("state.populations: must not all vanish");
    RealVector p(dim);
    for (int i = 0; i < dim; ++i) p(i) = st.populations[static_cast<std::size_t>(i)] / total;
    rho = DensityOperator(v * p.cast<Complex>().asDiagonal() * v.adjoint());
  } else if (st.type == "gibbs") {
    rho = DensityOperator::gibbs(d.initial_hamiltonian(), st.temperature);
  } else if (st.type == "floquet") {
    if (s.drive.protocol != "cyclic" && s.drive.protocol != "cyclic-piecewise") {
      throw ValidationError("state.type: floquet needs the cyclic or cyclic-piecewise protocol");
    }
    rho = DensityOperator::pure(floquet_state(cyclic_params(s)));
  } else if (st.type == "random") {
    std::mt19937_64 rng(s.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector psi(dim);
    for (int i = 0; i < dim; ++i) psi(i) = Complex(normal(rng), normal(rng));
    rho = DensityOperator::pure(psi);
  }
  if (st.dephase) rho = dephase(rho, d.initial_hamiltonian());
  return rho;
}

CountingGrid build_grid(const Scenario& s) {
  return CountingGrid::symmetric(s.grid.lambda_max, s.grid.points);
}

}  // namespace qfcs
