#include "qfcs/open_system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qfcs/error.hpp"

namespace qfcs {

CompositeModel::CompositeModel(DriveProtocol drive, HermitianOperator env_hamiltonian,
                               HermitianOperator coupling, double g)
    : drive_(std::move(drive)), env_(std::move(env_hamiltonian)), coupling_(std::move(coupling)), g_(g) {
  if (!std::isfinite(g_)) throw ValidationError("CompositeModel: coupling scale g must be finite");
  if (coupling_.dim() != dim_s() * dim_e()) {
    std::ostringstream os;
    os << "CompositeModel: H_SE has dimension " << coupling_.dim() << ", expected " << dim_s() << " x "
       << dim_e() << " = " << dim_s() * dim_e();
    throw ValidationError(os.str());
  }
}

CompositeModel CompositeModel::with_coupling_scale(double g) const {
  return CompositeModel(drive_, env_, coupling_, g);
}

// ---------------------------------------------------------------------------
// Presets

std::vector<std::string> environment_preset_names() {
  return {"qubit-exchange", "qubit-xx", "qubit-zx", "oscillator"};
}

EnvironmentPreset environment_preset(const std::string& name, std::size_t dim_s, double frequency,
                                     int levels) {
  if (dim_s != 2) {
    throw ValidationError("environment preset '" + name + "' needs a qubit system (dimension 2)");
  }
  if (!std::isfinite(frequency)) throw ValidationError("environment preset: frequency must be finite");
  const Matrix qubit_env = 0.5 * frequency * pauli::z();
  if (name == "qubit-exchange") {
    const Matrix c = tensor(pauli::raising(), pauli::lowering()) + tensor(pauli::lowering(), pauli::raising());
    return {name, HermitianOperator(qubit_env), HermitianOperator(c)};
  }
  if (name == "qubit-xx") {
    return {name, HermitianOperator(qubit_env), HermitianOperator(tensor(pauli::x(), pauli::x()))};
  }
  if (name == "qubit-zx") {
    return {name, HermitianOperator(qubit_env), HermitianOperator(tensor(pauli::z(), pauli::x()))};
  }
  if (name == "oscillator") {
    if (levels < 2 || levels > 8) throw ValidationError("oscillator preset: levels must be in [2, 8]");
    Matrix a = Matrix::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const Matrix h = frequency * a.adjoint() * a;
    return {name, HermitianOperator(h), HermitianOperator(tensor(pauli::x(), Matrix(a + a.adjoint())))};
  }
  std::ostringstream os;
  os << "unknown environment preset '" << name << "'; available:";
  for (const auto& n : environment_preset_names()) os << " " << n;
  throw ValidationError(os.str());
}

// ---------------------------------------------------------------------------
// Step data shared by every composite computation

namespace {

struct CompositeSteps {
  std::size_t ds = 0;
  std::size_t de = 0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<HermitianOperator> hs;
  std::vector<EigenSystem> eig;
  std::vector<Matrix> prop;
  HermitianOperator h_initial;
  HermitianOperator h_final;
  EigenSystem eig_initial;
  EigenSystem eig_final;
  Matrix env_identity;

  CompositeSteps(const CompositeModel& m, int steps)
      : CompositeSteps(m, discretize(m.drive(), steps)) {}

  CompositeSteps(const CompositeModel& m, const DiscretizedDrive& d)
      : ds(m.dim_s()),
        de(m.dim_e()),
        dt(d.dt()),
        h_initial(d.initial_hamiltonian()),
        h_final(d.final_hamiltonian()),
        eig_initial(eig_hermitian(h_initial)),
        eig_final(eig_hermitian(h_final)),
        env_identity(identity(m.dim_e())) {
    const Matrix is = identity(ds);
    const Matrix rest = tensor(is, m.env_hamiltonian().matrix()) + m.g() * m.coupling().matrix();
    for (const auto& step : d.steps()) {
      times.push_back(step.time);
      hs.push_back(step.hamiltonian);
      eig.push_back(eig_hermitian(step.hamiltonian));
      const HermitianOperator total(tensor(step.hamiltonian.matrix(), env_identity) + rest);
      prop.push_back(expm_unitary(total, dt).matrix());
    }
  }

  std::size_t count() const { return hs.size(); }

  // exp(-i s H_S) (x) 1
  Matrix kick(const EigenSystem& e, double s) const {
    return tensor(expm_unitary(e, s).matrix(), env_identity);
  }

  Matrix block(std::size_t k, double lambda) const {
    return kick(eig[k], 0.5 * lambda) * prop[k] * kick(eig[k], -0.5 * lambda);
  }

  Matrix blocks(double lambda) const {
    Matrix u = identity(ds * de);
    for (std::size_t k = 0; k < count(); ++k) u = block(k, lambda) * u;
    return u;
  }

  Matrix full(double lambda) const {
    return kick(eig_final, -0.5 * lambda) * blocks(lambda) * kick(eig_initial, 0.5 * lambda);
  }

  Matrix evolution() const {
    Matrix u = identity(ds * de);
    for (const auto& p : prop) u = p * u;
    return u;
  }
};

void check_states(const CompositeModel& m, const DensityOperator& rho_s, const DensityOperator& rho_e) {
  if (rho_s.dim() != m.dim_s() || rho_e.dim() != m.dim_e()) {
    std::ostringstream os;
    os << "open system: states have dimensions (" << rho_s.dim() << ", " << rho_e.dim()
       << "), model expects (" << m.dim_s() << ", " << m.dim_e() << ")";
    throw ValidationError(os.str());
  }
}

void check_options(const OpenRunOptions& options) {
  if (options.refresh_interval < 0) throw ValidationError("refresh_interval must be >= 0");
}

bool refresh_after(const OpenRunOptions& options, std::size_t k, std::size_t count) {
  return options.refresh_interval > 0 && (k + 1) % static_cast<std::size_t>(options.refresh_interval) == 0 &&
         k + 1 < count;
}

// Tr[U(lambda) rho U(-lambda)^dag] propagated step by step, so that the
// environment can be reset between steps.
Complex stepwise_generating_function(const CompositeSteps& s, const Matrix& rho, const Matrix& rho_e,
                                     double lambda, double block_sign, bool boundary,
                                     const OpenRunOptions& options) {
  Matrix x = rho;
  if (boundary) {
    const Matrix k0 = s.kick(s.eig_initial, 0.5 * lambda);
    x = k0 * x * k0;
  }
  const double l = block_sign * lambda;
  for (std::size_t k = 0; k < s.count(); ++k) {
    x = s.block(k, l) * x * s.block(k, -l).adjoint();
    if (refresh_after(options, k, s.count())) x = tensor(partial_trace_env(x, s.ds, s.de), rho_e);
  }
  if (boundary) {
    const Matrix kn = s.kick(s.eig_final, -0.5 * lambda);
    x = kn * x * kn;
  }
  return x.trace();
}

double energy(const HermitianOperator& h, const Matrix& rho_s) {
  return (h.matrix() * rho_s).trace().real();
}

}  // namespace

HermitianOperator step_hamiltonian(const CompositeModel& model, int steps, int k) {
  const DiscretizedDrive d = discretize(model.drive(), steps);
  if (k < 0 || k >= steps) throw ValidationError("step_hamiltonian: step index out of range");
  const Matrix ie = identity(model.dim_e());
  return HermitianOperator(tensor(d.steps()[static_cast<std::size_t>(k)].hamiltonian.matrix(), ie) +
                           tensor(identity(model.dim_s()), model.env_hamiltonian().matrix()) +
                           model.g() * model.coupling().matrix());
}

UnitaryOperator measurement_block(const CompositeModel& model, int steps, int k, double lambda) {
  if (k < 0 || k >= steps) throw ValidationError("measurement_block: step index out of range");
  const CompositeSteps s(model, steps);
  return UnitaryOperator(s.block(static_cast<std::size_t>(k), lambda));
}

UnitaryOperator full_counting_operator(const CompositeModel& model, int steps, double lambda) {
  return UnitaryOperator(CompositeSteps(model, steps).full(lambda));
}

UnitaryOperator block_product(const CompositeModel& model, int steps, double lambda) {
  return UnitaryOperator(CompositeSteps(model, steps).blocks(lambda));
}

CharacteristicSamples open_characteristic_function(const CompositeModel& model,
                                                   const DensityOperator& rho_s,
                                                   const DensityOperator& rho_e, int steps,
                                                   const CountingGrid& grid,
                                                   const OpenRunOptions& options) {
  check_states(model, rho_s, rho_e);
  check_options(options);
  const CompositeSteps s(model, steps);
  const Matrix rho = tensor(rho_s.matrix(), rho_e.matrix());
  CharacteristicSamples out{grid, {}};
  out.values.reserve(grid.size());
  for (double lambda : grid.values()) {
    if (options.refresh_interval > 0) {
      out.values.push_back(
          stepwise_generating_function(s, rho, rho_e.matrix(), lambda, 1.0, true, options));
    } else {
      out.values.push_back((s.full(lambda) * rho * s.full(-lambda).adjoint()).trace());
    }
  }
  return out;
}

CharacteristicSamples heat_characteristic_function(const CompositeModel& model,
                                                   const DensityOperator& rho_s,
                                                   const DensityOperator& rho_e, int steps,
                                                   const CountingGrid& grid,
                                                   const OpenRunOptions& options) {
  check_states(model, rho_s, rho_e);
  check_options(options);
  const CompositeSteps s(model, steps);
  const Matrix rho = tensor(rho_s.matrix(), rho_e.matrix());
  CharacteristicSamples out{grid, {}};
  out.values.reserve(grid.size());
  for (double lambda : grid.values()) {
    if (options.refresh_interval > 0) {
      out.values.push_back(
          stepwise_generating_function(s, rho, rho_e.matrix(), lambda, -1.0, false, options));
    } else {
      out.values.push_back((s.blocks(-lambda) * rho * s.blocks(lambda).adjoint()).trace());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ledger

double HeatLedger::max_abs_heat() const {
  double m = 0.0;
  for (const auto& s : steps) m = std::max(m, std::abs(s.heat));
  return m;
}

double HeatLedger::identity_residual() const {
  return std::abs(work_increments - (internal_energy_change - heat));
}

HeatLedger heat_ledger(const CompositeModel& model, const DensityOperator& rho_s,
                       const DensityOperator& rho_e, int steps, const OpenRunOptions& options) {
  check_states(model, rho_s, rho_e);
  check_options(options);
  const CompositeSteps s(model, steps);
  Matrix rho = tensor(rho_s.matrix(), rho_e.matrix());
  Matrix prev = rho_s.matrix();
  double prev_entropy = von_neumann_entropy(rho_s);
  HeatLedger ledger;
  for (std::size_t k = 0; k < s.count(); ++k) {
    rho = s.prop[k] * rho * s.prop[k].adjoint();
    const Matrix reduced = partial_trace_env(rho, s.ds, s.de);
    const double entropy = von_neumann_entropy(DensityOperator(reduced, Tolerances{1e-10, 1e-10, 1e-10, 1e-10}));
    LedgerStep step;
    step.k = static_cast<int>(k);
    step.time = s.times[k];
    step.heat = energy(s.hs[k], reduced - prev);
    step.entropy_change = entropy - prev_entropy;
    ledger.heat += step.heat;
    step.cumulative_heat = ledger.heat;
    const HermitianOperator& next = (k + 1 < s.count()) ? s.hs[k + 1] : s.h_final;
    ledger.work_increments += energy(next - s.hs[k], reduced);
    ledger.steps.push_back(step);
    prev = reduced;
    prev_entropy = entropy;
    if (refresh_after(options, k, s.count())) rho = tensor(reduced, rho_e.matrix());
  }
  ledger.internal_energy_change = energy(s.h_final, prev) - energy(s.h_initial, rho_s.matrix());
  ledger.work = ledger.internal_energy_change - ledger.heat;
  return ledger;
}

double work_via_increments(const CompositeModel& model, const DensityOperator& rho_s,
                           const DensityOperator& rho_e, int steps, const OpenRunOptions& options) {
  return heat_ledger(model, rho_s, rho_e, steps, options).work_increments;
}

// ---------------------------------------------------------------------------
// Environment-side counting

namespace {

void require_constant_system(const CompositeSteps& s) {
  const double scale = std::max(1.0, max_abs(s.h_initial.matrix()));
  double dev = max_abs(s.h_final.matrix() - s.h_initial.matrix());
  for (const auto& h : s.hs) dev = std::max(dev, max_abs(h.matrix() - s.h_initial.matrix()));
  if (dev > 1e-12 * scale) {
    std::ostringstream os;
    os << "environment counting needs a constant system Hamiltonian; it varies by " << dev;
    throw ValidationError(os.str());
  }
}

Matrix env_kick(const EigenSystem& env, std::size_t ds, double s) {
  return tensor(identity(ds), expm_unitary(env, s).matrix());
}

}  // namespace

UnitaryOperator environment_counting_operator(const CompositeModel& model, int steps, double lambda) {
  const CompositeSteps s(model, steps);
  require_constant_system(s);
  const EigenSystem env = eig_hermitian(model.env_hamiltonian());
  return UnitaryOperator(env_kick(env, s.ds, -0.5 * lambda) * s.evolution() *
                         env_kick(env, s.ds, 0.5 * lambda));
}

CharacteristicSamples environment_characteristic_function(const CompositeModel& model,
                                                          const DensityOperator& rho_s,
                                                          const DensityOperator& rho_e, int steps,
                                                          const CountingGrid& grid) {
  check_states(model, rho_s, rho_e);
  const CompositeSteps s(model, steps);
  require_constant_system(s);
  const EigenSystem env = eig_hermitian(model.env_hamiltonian());
  const Matrix u = s.evolution();
  const Matrix rho = tensor(rho_s.matrix(), rho_e.matrix());
  auto op = [&](double l) { return Matrix(env_kick(env, s.ds, -0.5 * l) * u * env_kick(env, s.ds, 0.5 * l)); };
  CharacteristicSamples out{grid, {}};
  for (double lambda : grid.values()) out.values.push_back((op(lambda) * rho * op(-lambda).adjoint()).trace());
  return out;
}

CharacteristicSamples system_energy_characteristic_function(const CompositeModel& model,
                                                            const DensityOperator& rho_s,
                                                            const DensityOperator& rho_e, int steps,
                                                            const CountingGrid& grid) {
  check_states(model, rho_s, rho_e);
  const CompositeSteps s(model, steps);
  const Matrix u = s.evolution();
  const Matrix rho = tensor(rho_s.matrix(), rho_e.matrix());
  auto op = [&](double l) {
    return Matrix(s.kick(s.eig_final, -0.5 * l) * u * s.kick(s.eig_initial, 0.5 * l));
  };
  CharacteristicSamples out{grid, {}};
  for (double lambda : grid.values()) out.values.push_back((op(lambda) * rho * op(-lambda).adjoint()).trace());
  return out;
}

double duality_deviation(const CompositeModel& model, const DensityOperator& rho_s,
                         const DensityOperator& rho_e, int steps, const CountingGrid& grid) {
  const CharacteristicSamples env = environment_characteristic_function(model, rho_s, rho_e, steps, grid);
  const CharacteristicSamples sys = system_energy_characteristic_function(model, rho_s, rho_e, steps, grid);
  const std::size_t n = grid.size();
  double worst = 0.0;
  // The grid is symmetric, so G_S(-lambda_i) sits at index n - 1 - i.
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(env.values[i] - sys.values[n - 1 - i]));
  return worst;
}

// ---------------------------------------------------------------------------
// Fast decoherence

double von_neumann_entropy(const DensityOperator& rho) {
  const EigenSystem eig = eig_hermitian(HermitianOperator(rho.matrix()));
  double s = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double p = eig.values(i);
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

HeatLedger fast_decoherence_run(const DriveProtocol& drive, double temperature, int steps) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ValidationError("fast_decoherence_run: temperature must be positive");
  }
  const DiscretizedDrive d = discretize(drive, steps);
  const DensityOperator rho0 = DensityOperator::gibbs(d.initial_hamiltonian(), temperature);
  Matrix prev = rho0.matrix();
  double prev_entropy = von_neumann_entropy(rho0);
  HeatLedger ledger;
  const auto& st = d.steps();
  for (std::size_t k = 0; k < st.size(); ++k) {
    const DensityOperator state = DensityOperator::gibbs(st[k].hamiltonian, temperature);
    const double entropy = von_neumann_entropy(state);
    LedgerStep step;
    step.k = static_cast<int>(k);
    step.time = st[k].time;
    step.heat = energy(st[k].hamiltonian, state.matrix() - prev);
    step.entropy_change = entropy - prev_entropy;
    ledger.heat += step.heat;
    step.cumulative_heat = ledger.heat;
    const HermitianOperator& next = (k + 1 < st.size()) ? st[k + 1].hamiltonian : d.final_hamiltonian();
    ledger.work_increments += energy(next - st[k].hamiltonian, state.matrix());
    ledger.steps.push_back(step);
    prev = state.matrix();
    prev_entropy = entropy;
  }
  ledger.internal_energy_change =
      energy(d.final_hamiltonian(), prev) - energy(d.initial_hamiltonian(), rho0.matrix());
  ledger.work = ledger.internal_energy_change - ledger.heat;
  return ledger;
}

std::vector<double> entropy_relation_errors(const HeatLedger& ledger, double temperature, double floor) {
  std::vector<double> out;
  out.reserve(ledger.steps.size());
  for (const auto& s : ledger.steps) {
    out.push_back(std::abs(s.heat - temperature * s.entropy_change) / std::max(std::abs(s.heat), floor));
  }
  return out;
}

}  // namespace qfcs
