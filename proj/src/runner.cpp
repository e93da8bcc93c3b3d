#include "qfcs/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "qfcs/cyclic_example.hpp"
#include "qfcs/error.hpp"
#include "qfcs/fcs_closed.hpp"
#include "qfcs/open_system.hpp"
#include "qfcs/paths.hpp"
#include "qfcs/tmp.hpp"

namespace qfcs {

bool RunResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

namespace {

Json table_json(const Table& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json obj = Json::object();
    for (std::size_t c = 0; c < t.columns.size(); ++c) obj[t.columns[c]] = r[c];
    rows.push_back(obj);
  }
  return rows;
}

Json checks_json(const std::vector<Check>& checks) {
  Json out = Json::array();
  for (const auto& c : checks) {
    out.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed}});
  }
  return out;
}

}  // namespace

Json RunResult::report(bool embed_tables) const {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = scenario.name;
  j["kind"] = to_string(scenario.kind);
  j["config"] = resolved(scenario);
  j["headline"] = headline;
  j["observations"] = observations;
  j["checks"] = checks_json(checks);
  j["passed"] = passed();
  if (embed_tables) {
    Json data = Json::object();
    for (const auto& t : tables) data[t.name] = table_json(t);
    j["data"] = data;
  }
  return j;
}

namespace {

// ---------------------------------------------------------------------------
// Helpers

void check(RunResult& r, const std::string& name, double value, double tol) {
  r.checks.push_back({name, value, tol, std::isfinite(value) && value <= tol});
}

Table samples_table(const std::string& name, const CharacteristicSamples& s, const std::string& protocol = {}) {
  Table t{name, protocol.empty() ? std::vector<std::string>{"lambda", "re", "im"}
                                 : std::vector<std::string>{"protocol", "lambda", "re", "im"}, {}};
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    std::vector<Json> row;
    if (!protocol.empty()) row.push_back(protocol);
    row.insert(row.end(), {s.grid.values()[i], s.values[i].real(), s.values[i].imag()});
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table distribution_table(const std::string& name, const QuasiDistribution& d, const std::string& protocol = {}) {
  Table t{name, protocol.empty() ? std::vector<std::string>{"support", "weight"}
                                 : std::vector<std::string>{"protocol", "support", "weight"}, {}};
  for (std::size_t i = 0; i < d.support.size(); ++i) {
    std::vector<Json> row;
    if (!protocol.empty()) row.push_back(protocol);
    row.insert(row.end(), {d.support[i], d.weights[i]});
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table ledger_table(const HeatLedger& l) {
  Table t{"ledger", {"k", "t_k", "Q_k", "dS_k", "cumQ"}, {}};
  for (const auto& s : l.steps) t.rows.push_back({s.k, s.time, s.heat, s.entropy_change, s.cumulative_heat});
  return t;
}

Json ledger_totals(const HeatLedger& l) {
  return {{"heat", l.heat},
          {"internal_energy_change", l.internal_energy_change},
          {"work", l.work},
          {"work_increments", l.work_increments},
          {"max_abs_heat_step", l.max_abs_heat()}};
}

double max_gap(const CharacteristicSamples& a, const CharacteristicSamples& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

double coherence_norm(const DensityOperator& rho, const HermitianOperator& h) {
  return max_abs(rho.matrix() - dephase(rho, h).matrix());
}

Json empty_headline() {
  return {{"first_moment", nullptr}, {"second_moment", nullptr},    {"heat", nullptr},
          {"work", nullptr},         {"min_quasi_weight", nullptr}, {"tmp_average", nullptr},
          {"duality_deviation", nullptr}};
}

// ---------------------------------------------------------------------------
// Closed system

struct ClosedOutputs {
  std::vector<SpectralWorkTerm> terms;
  QuasiDistribution distribution;
  double bin_tol = 0.0;
  double first_moment = 0.0;
};

ClosedOutputs run_closed_core(RunResult& r, const DiscretizedDrive& d, const DensityOperator& rho,
                              const CountingGrid& grid) {
  const Scenario& s = r.scenario;
  const ToleranceSpec& tol = s.tolerances;
  ClosedOutputs out;
  const CharacteristicSamples g = characteristic_function(rho, d, grid);
  out.terms = spectral_decomposition(rho, d);
  out.bin_tol = default_bin_tolerance(out.terms);
  out.distribution = quasi_distribution(out.terms, out.bin_tol);

  double recon = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    recon = std::max(recon, std::abs(reconstruct(out.terms, grid.values()[i]) - g.values[i]));
  }
  check(r, "normalization", g.normalization_error(), tol.normalization);
  check(r, "hermiticity", g.hermiticity_error(), tol.hermiticity);
  check(r, "spectral_reconstruction", recon, tol.identity);
  check(r, "distribution_total_weight", std::abs(out.distribution.total_weight() - 1.0), tol.identity);

  const double mean = mean_energy_change(rho, d);
  out.first_moment = moment(out.terms, 1).value;
  check(r, "first_moment_identity", std::abs(out.first_moment - mean), tol.identity);

  Table moments{"moments", {"n", "spectral", "finite_difference", "fd_step", "relative_gap", "imag_residual"}, {}};
  double second = 0.0;
  for (int n = 1; n <= s.max_moment; ++n) {
    const MomentEstimate m = moment(out.terms, n);
    const double h = default_fd_step(out.terms, n);
    const CharacteristicSamples fd_samples = characteristic_function(rho, d, fd_grid(h, n));
    check(r, "fd_stencil_normalization_" + std::to_string(n), fd_samples.normalization_error(), tol.normalization);
    check(r, "fd_stencil_hermiticity_" + std::to_string(n), fd_samples.hermiticity_error(), tol.hermiticity);
    const double fd = moment_fd(fd_samples, n, h);
    const double scale = std::max(absolute_moment(out.terms, n), 1e6 * fd_roundoff_floor(n, h));
    const double rel = std::abs(fd - m.value) / scale;
    check(r, "fd_moment_" + std::to_string(n), rel, tol.fd_relative);
    moments.rows.push_back({n, m.value, fd, h, rel, m.imag_residual});
    if (n == 2) second = m.value;
  }

  const CoherentClassicalSplit split = coherent_classical_split(out.terms);
  r.observations["mean_energy_change"] = mean;
  r.observations["classical_part"] = split.classical;
  r.observations["coherent_part"] = split.coherent;
  r.observations["bin_tolerance"] = out.bin_tol;
  r.observations["support_points"] = out.distribution.support.size();
  r.observations["steps"] = d.step_count();
  int negatives = 0;
  for (double w : out.distribution.weights) negatives += (w < -1e-12) ? 1 : 0;
  r.observations["negative_weights"] = negatives;

  r.headline["first_moment"] = out.first_moment;
  r.headline["second_moment"] = s.max_moment >= 2 ? Json(second) : Json(moment(out.terms, 2).value);
  r.headline["min_quasi_weight"] = out.distribution.min_weight();

  Table terms_table{"spectral_terms", {"i", "j", "k", "support", "weight_re", "weight_im"}, {}};
  for (const auto& t : out.terms) {
    terms_table.rows.push_back({t.i, t.j, t.k, t.support, t.weight.real(), t.weight.imag()});
  }
  r.tables.push_back(samples_table("characteristic", g));
  r.tables.push_back(std::move(terms_table));
  r.tables.push_back(distribution_table("distribution", out.distribution));
  r.tables.push_back(std::move(moments));
  return out;
}

void run_tmp_part(RunResult& r, const DiscretizedDrive& d, const DensityOperator& rho, const CountingGrid& grid,
                  const ClosedOutputs& closed) {
  const ToleranceSpec& tol = r.scenario.tolerances;
  const auto outcomes = tmp_distribution(rho, d);
  const QuasiDistribution dist = tmp_work_distribution(outcomes, closed.bin_tol);
  const CharacteristicSamples g_tmp = tmp_characteristic(outcomes, grid);
  double total = 0.0;
  double min_p = 1.0;
  for (const auto& o : outcomes) {
    total += o.probability;
    min_p = std::min(min_p, o.probability);
  }
  check(r, "tmp_probability_sum", std::abs(total - 1.0), 1e-12);
  r.observations["tmp_min_probability"] = min_p;

  const double tmp_avg = tmp_average(outcomes);
  r.headline["tmp_average"] = tmp_avg;
  r.observations["tmp_average"] = tmp_avg;
  r.observations["fcs_minus_tmp_first_moment"] = closed.first_moment - tmp_avg;
  r.observations["classical_minus_tmp"] = coherent_classical_split(closed.terms).classical - tmp_avg;
  Json tmp_moments = Json::array();
  for (int n = 1; n <= r.scenario.max_moment; ++n) tmp_moments.push_back(tmp_moment(outcomes, n));
  r.observations["tmp_moments"] = tmp_moments;

  const double coherence = coherence_norm(rho, d.initial_hamiltonian());
  r.observations["initial_coherence"] = coherence;
  if (coherence <= 1e-12) {
    const DistributionComparison cmp = compare_distributions(closed.distribution, dist, 1e-9);
    check(r, "mixture_support_match", cmp.max_support_gap, 1e-9);
    check(r, "mixture_weight_match", std::max(cmp.max_weight_gap, cmp.unmatched_weight), tol.identity);
    const CharacteristicSamples g = characteristic_function(rho, d, grid);
    check(r, "mixture_characteristic_match", max_gap(g, g_tmp), tol.identity);
    double worst = 0.0;
    for (int n = 1; n <= r.scenario.max_moment; ++n) {
      const double scale = std::max(1.0, absolute_moment(closed.terms, n));
      worst = std::max(worst, std::abs(moment(closed.terms, n).value - tmp_moment(outcomes, n)) / scale);
    }
    check(r, "mixture_moments_match", worst, 1e-9);
  }

  Table ot{"tmp_outcomes", {"protocol", "i", "k", "initial_energy", "final_energy", "probability", "work"}, {}};
  for (const auto& o : outcomes) {
    ot.rows.push_back({"tmp", o.i, o.k, o.initial_energy, o.final_energy, o.probability, o.work});
  }
  r.tables.push_back(std::move(ot));
  r.tables.push_back(distribution_table("tmp_distribution", dist, "tmp"));
  r.tables.push_back(samples_table("tmp_characteristic", g_tmp, "tmp"));
}

void run_closed(RunResult& r) {
  const DiscretizedDrive d = build_drive(r.scenario);
  const DensityOperator rho = build_state(r.scenario, d);
  const CountingGrid grid = build_grid(r.scenario);
  const ClosedOutputs closed = run_closed_core(r, d, rho, grid);
  if (r.scenario.kind == ScenarioKind::tmp_compare) run_tmp_part(r, d, rho, grid, closed);
}

void run_cyclic(RunResult& r) {
  const Scenario& s = r.scenario;
  const CyclicExampleParams p = cyclic_params(s);
  const DiscretizedDrive d = build_drive(s);
  const DensityOperator rho = build_state(s, d);
  const CountingGrid grid = build_grid(s);
  const ClosedOutputs closed = run_closed_core(r, d, rho, grid);
  run_tmp_part(r, d, rho, grid, closed);

  const Matrix reference = cyclic_unitary_matrix(p);
  const Matrix u = evolution_operator(d).matrix();
  check(r, "closed_form_unitary_match", max_abs(u - reference), 1e-12);

  const Vector psi = floquet_state(p);
  if (s.state.type == "floquet" && !s.state.dephase) {
    check(r, "floquet_phase", (u * psi - std::exp(kI * p.xi) * psi).cwiseAbs().maxCoeff(), 1e-12);
    check(r, "cyclic_invariance", std::abs(closed.first_moment), s.tolerances.identity);
  }

  // Outcome enumeration straight from the closed-form matrix.
  const double e[2] = {-0.5 * p.energy_gap, 0.5 * p.energy_gap};
  double oracle = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) oracle += rho.matrix()(i, i).real() * std::norm(reference(k, i)) * (e[k] - e[i]);
  }
  const double tmp_avg = r.headline["tmp_average"].get<double>();
  check(r, "tmp_matches_matrix_enumeration", std::abs(tmp_avg - oracle), 1e-12);
  r.observations["tmp_matrix_enumeration"] = oracle;
  r.observations["closed_form_sin2_xi"] = cyclic_tmp_average(p);
  r.observations["closed_form_sin2_2xi"] = cyclic_tmp_average_double_angle(p);
  r.observations["enumeration_minus_sin2_xi_form"] = oracle - cyclic_tmp_average(p);
  r.observations["enumeration_minus_sin2_2xi_form"] = oracle - cyclic_tmp_average_double_angle(p);

  // The same U(T) realized by a piecewise-constant drive.
  const DiscretizedDrive physical = discretize(cyclic_physical_protocol(p), 4);
  check(r, "piecewise_drive_unitary_match", max_abs(evolution_operator(physical).matrix() - reference), 1e-10);
  const DensityOperator rho_phys = build_state(s, physical);
  r.observations["piecewise_drive_first_moment"] = mean_energy_change(rho_phys, physical);
  if (s.state.type == "floquet" && !s.state.dephase) {
    check(r, "piecewise_drive_cyclic_invariance",
          std::abs(moment(spectral_decomposition(rho_phys, physical), 1).value), s.tolerances.identity);
  }

  const DensityOperator dephased = dephase(rho, d.initial_hamiltonian());
  const auto dephased_terms = spectral_decomposition(dephased, d);
  const QuasiDistribution dd = quasi_distribution(dephased_terms, default_bin_tolerance(dephased_terms));
  r.observations["dephased_min_weight"] = dd.min_weight();
  r.tables.push_back(distribution_table("dephased_distribution", dd));
}

// ---------------------------------------------------------------------------
// Open system

DensityOperator environment_state(const EnvironmentSpec& env, const HermitianOperator& h_e) {
  const EigenSystem eig = eig_hermitian(h_e);
  const Matrix& v = eig.vectors.matrix();
  if (env.state == "gibbs") return DensityOperator::gibbs(h_e, env.temperature);
  if (env.state == "ground") return DensityOperator::pure(v.col(0));
  if (env.state == "excited") return DensityOperator::pure(v.col(v.cols() - 1));
  Vector plus = v.col(0) + v.col(v.cols() - 1);
  return DensityOperator::pure(plus);
}

double energy_range(const DiscretizedDrive& d) {
  double r = 0.0;
  auto span_of = [](const HermitianOperator& h) {
    const RealVector e = eig_hermitian(h).values;
    return e.maxCoeff() - e.minCoeff();
  };
  r = std::max(span_of(d.initial_hamiltonian()), span_of(d.final_hamiltonian()));
  for (const auto& st : d.steps()) r = std::max(r, span_of(st.hamiltonian));
  return std::max(r, 1.0);
}

bool is_constant(const DiscretizedDrive& d) {
  const Matrix& h0 = d.initial_hamiltonian().matrix();
  const double scale = std::max(1.0, max_abs(h0));
  double dev = max_abs(d.final_hamiltonian().matrix() - h0);
  for (const auto& st : d.steps()) dev = std::max(dev, max_abs(st.hamiltonian.matrix() - h0));
  return dev <= 1e-12 * scale;
}

void run_open(RunResult& r) {
  const Scenario& s = r.scenario;
  if (s.drive.protocol == "cyclic") throw ValidationError("drive.protocol: open runs need a continuous protocol");
  const DriveProtocol protocol = build_protocol(s);
  const DiscretizedDrive d = build_drive(s);
  const int n = static_cast<int>(d.step_count());
  const EnvironmentPreset preset =
      environment_preset(s.environment.preset, protocol.dim(), s.environment.frequency, s.environment.levels);
  const CompositeModel model(protocol, preset.env_hamiltonian, preset.coupling, s.environment.g);
  const DensityOperator rho_s = build_state(s, d);
  const DensityOperator rho_e = environment_state(s.environment, preset.env_hamiltonian);
  const OpenRunOptions options{s.environment.refresh_interval};
  const ToleranceSpec& tol = s.tolerances;

  const HeatLedger ledger = heat_ledger(model, rho_s, rho_e, n, options);
  check(r, "ledger_identity", ledger.identity_residual(), tol.identity);
  if (s.environment.g == 0.0) check(r, "unitary_limit_heat", ledger.max_abs_heat(), 1e-12);
  const bool constant = is_constant(d);
  if (constant) check(r, "constant_drive_work", std::abs(ledger.work), tol.identity);

  const CountingGrid grid = build_grid(s);
  const CharacteristicSamples g = open_characteristic_function(model, rho_s, rho_e, n, grid, options);
  const CharacteristicSamples gq = heat_characteristic_function(model, rho_s, rho_e, n, grid, options);
  check(r, "normalization", g.normalization_error(), tol.normalization);
  check(r, "hermiticity", g.hermiticity_error(), tol.hermiticity);
  check(r, "heat_normalization", gq.normalization_error(), tol.normalization);
  check(r, "heat_hermiticity", gq.hermiticity_error(), tol.hermiticity);

  const double h = 1e-3 / energy_range(d);
  const CountingGrid fd = fd_grid(h, 2);
  const CharacteristicSamples g_fd = open_characteristic_function(model, rho_s, rho_e, n, fd, options);
  const CharacteristicSamples gq_fd = heat_characteristic_function(model, rho_s, rho_e, n, fd, options);
  const double w_fd = moment_fd(g_fd, 1, h);
  const double q_fd = moment_fd(gq_fd, 1, h);
  check(r, "cgf_first_moment_equals_work", std::abs(w_fd - ledger.work), tol.cgf_moment);
  check(r, "heat_cgf_first_moment_equals_heat", std::abs(q_fd - ledger.heat), tol.cgf_moment);
  if (constant) {
    check(r, "constant_drive_heat_cgf_equals_energy_cgf",
          max_gap(gq, system_energy_characteristic_function(model, rho_s, rho_e, n, grid)), tol.identity);
  }

  r.headline["first_moment"] = w_fd;
  r.headline["second_moment"] = moment_fd(g_fd, 2, h);
  r.headline["heat"] = ledger.heat;
  r.headline["work"] = ledger.work;
  r.observations["totals"] = ledger_totals(ledger);
  r.observations["heat_second_moment"] = moment_fd(gq_fd, 2, h);
  r.observations["steps"] = n;

  if (s.environment.duality) {
    if (!constant) throw ValidationError("environment.duality: needs a constant system Hamiltonian");
    const double dev = duality_deviation(model, rho_s, rho_e, n, grid);
    r.headline["duality_deviation"] = dev;
    r.tables.push_back(samples_table("environment_characteristic",
                                     environment_characteristic_function(model, rho_s, rho_e, n, grid)));
  }
  r.tables.push_back(ledger_table(ledger));
  r.tables.push_back(samples_table("characteristic", g));
  r.tables.push_back(samples_table("heat_characteristic", gq));
}

// ---------------------------------------------------------------------------
// Fast decoherence

void run_fast_decoherence(RunResult& r) {
  const Scenario& s = r.scenario;
  const DriveProtocol protocol = build_protocol(s);
  const int n = static_cast<int>(build_drive(s).step_count());
  const double temp = s.decoherence.temperature;
  const HeatLedger ledger = fast_decoherence_run(protocol, temp, n);
  check(r, "ledger_identity", ledger.identity_residual(), s.tolerances.identity);
  const std::vector<double> errors = entropy_relation_errors(ledger, temp);
  Table rel{"entropy_relation", {"k", "Q_k", "T_dS_k", "relative_error"}, {}};
  double worst = 0.0;
  for (std::size_t k = 0; k < errors.size(); ++k) {
    const auto& st = ledger.steps[k];
    rel.rows.push_back({st.k, st.heat, temp * st.entropy_change, errors[k]});
    worst = std::max(worst, errors[k]);
  }
  r.headline["heat"] = ledger.heat;
  r.headline["work"] = ledger.work;
  r.observations["totals"] = ledger_totals(ledger);
  r.observations["max_entropy_relation_error"] = worst;
  r.observations["steps"] = n;
  r.tables.push_back(ledger_table(ledger));
  r.tables.push_back(std::move(rel));
}

// ---------------------------------------------------------------------------
// Paths

double completeness_error(const DiscretizedDrive& d, const PathFunctional& f) {
  const Matrix u = evolution_operator(d).matrix();
  const auto dim = static_cast<Eigen::Index>(d.dim());
  double worst = 0.0;
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto paths = enumerate_paths(d, f, Vector::Unit(dim, a), Vector::Unit(dim, b));
      worst = std::max(worst, std::abs(path_sum(paths) - u(b, a)));
    }
  }
  return worst;
}

double weighted_vs(const DiscretizedDrive& d, const PathFunctional& f, double lambda, const Matrix& target) {
  const auto dim = static_cast<Eigen::Index>(d.dim());
  double worst = 0.0;
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto paths = enumerate_paths(d, f, Vector::Unit(dim, a), Vector::Unit(dim, b));
      worst = std::max(worst, std::abs(counting_weighted_sum(paths, lambda) - target(b, a)));
    }
  }
  return worst;
}

bool within_guard(const DriveProtocol& p, int steps) {
  return std::pow(static_cast<double>(p.dim()), steps + 1) <= kMaxPaths;
}

void run_paths(RunResult& r) {
  const Scenario& s = r.scenario;
  const PathsSpec& ps = s.paths;
  const DriveProtocol protocol = build_protocol(s);
  if (protocol.dim() != 2 && (ps.obs_x != 0.0 || ps.obs_y != 0.0 || ps.obs_z != 0.0)) {
    throw ValidationError("paths: the Pauli observable needs a qubit drive");
  }
  const HermitianOperator obs(ps.obs_x * pauli::x() + ps.obs_y * pauli::y() + ps.obs_z * pauli::z());
  const DeltaConvention conv = parse_delta_convention(ps.convention);

  Table conv_table{"paths_convergence", {"N", "paths", "completeness", "boundary_vs_two_kick", "splitting"}, {}};
  std::vector<double> splitting;
  std::vector<double> boundary;
  for (int n = ps.steps, level = 0; level < 3 && within_guard(protocol, n); n *= 2, ++level) {
    const DiscretizedDrive d = discretize(protocol, n);
    const PathFunctional uniform = uniform_functional(obs, d.step_count(), ps.weight);
    const double comp = completeness_error(d, uniform);
    const PathFunctional delta = boundary_delta_functional(d, conv);
    const double bd = weighted_vs(d, delta, ps.lambda, two_kick_propagator(d, 2.0 * ps.lambda).matrix());
    const double sp = weighted_vs(d, uniform, ps.lambda, kicked_product(d, uniform, ps.lambda).matrix());
    conv_table.rows.push_back({n, std::pow(static_cast<double>(d.dim()), n + 1), comp, bd, sp});
    if (level == 0) {
      check(r, "path_sum_completeness", comp, 1e-10);
      if (conv == DeltaConvention::terminal) check(r, "terminal_kicks_equal_two_kick", bd, 1e-10);
      const auto paths = enumerate_paths(d, uniform, Vector::Unit(protocol.dim(), 0), Vector::Unit(protocol.dim(), 0));
      if (paths.size() <= 4096) {
        Table pt{"path_records", {"indices", "amplitude_re", "amplitude_im", "functional"}, {}};
        for (const auto& p : paths) {
          std::string idx;
          for (int i : p.indices) idx += std::to_string(i);
          pt.rows.push_back({idx, p.amplitude.real(), p.amplitude.imag(), p.functional});
        }
        r.tables.push_back(std::move(pt));
      }
    }
    splitting.push_back(sp);
    boundary.push_back(bd);
  }
  Json ratios = Json::array();
  for (std::size_t i = 0; i + 1 < splitting.size(); ++i) ratios.push_back(splitting[i] / splitting[i + 1]);
  r.observations["splitting_ratios"] = ratios;
  Json bratios = Json::array();
  if (conv == DeltaConvention::last_interval) {
    for (std::size_t i = 0; i + 1 < boundary.size(); ++i) bratios.push_back(boundary[i] / boundary[i + 1]);
  }
  r.observations["boundary_ratios"] = bratios;
  r.tables.push_back(std::move(conv_table));
}

}  // namespace

RunResult run_scenario(const Scenario& s) {
  RunResult r;
  r.scenario = s;
  r.headline = empty_headline();
  r.observations = Json::object();
  switch (s.kind) {
    case ScenarioKind::closed:
    case ScenarioKind::tmp_compare:
      run_closed(r);
      break;
    case ScenarioKind::cyclic_example:
      run_cyclic(r);
      break;
    case ScenarioKind::open:
      run_open(r);
      break;
    case ScenarioKind::fast_decoherence:
      run_fast_decoherence(r);
      break;
    case ScenarioKind::paths_check:
      run_paths(r);
      break;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Sweeps

Table SweepResult::table() const {
  static const std::vector<std::string> fields = {"first_moment", "second_moment",    "heat",
                                                  "work",         "min_quasi_weight", "tmp_average",
                                                  "duality_deviation"};
  Table t{"sweep", {parameter}, {}};
  t.columns.insert(t.columns.end(), fields.begin(), fields.end());
  t.columns.push_back("passed");
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<Json> row{values[i]};
    for (const auto& f : fields) row.push_back(runs[i].headline.value(f, Json(nullptr)));
    row.push_back(runs[i].passed());
    t.rows.push_back(std::move(row));
  }
  return t;
}

bool SweepResult::passed() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunResult& r) { return r.passed(); });
}

Json SweepResult::report() const {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = base.name;
  j["kind"] = to_string(base.kind);
  j["config"] = resolved(base);
  j["parameter"] = parameter;
  j["values"] = values;
  j["rows"] = table_json(table());
  Json failures = Json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (const auto& c : runs[i].checks) {
      if (!c.passed) failures.push_back({{"row", i}, {"check", c.name}, {"value", c.value}});
    }
  }
  j["failed_checks"] = failures;
  j["passed"] = passed();
  return j;
}

SweepResult run_sweep(const Scenario& base, const std::string& parameter, const std::vector<double>& values,
                      unsigned threads) {
  if (values.empty()) throw ValidationError("sweep: no values given");
  std::vector<Scenario> scenarios;
  scenarios.reserve(values.size());
  for (double v : values) scenarios.push_back(with_override(base, parameter, v));

  SweepResult out{base, parameter, values, std::vector<RunResult>(values.size())};
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        out.runs[i] = run_scenario(scenarios[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(values.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace qfcs
