#pragma once

// System + environment evolution with a detector coupled to the system
// energy at every step: heat ledger, work, the environment-side counting
// dual and the fast-decoherence limit.

#include <cstddef>
#include <string>
#include <vector>

#include "qfcs/drive.hpp"
#include "qfcs/fcs_closed.hpp"
#include "qfcs/linalg.hpp"

namespace qfcs {

/// H^k = H_S^k (x) 1 + 1 (x) H_E + g H_SE.
class CompositeModel {
 public:
  /// Throws ValidationError when H_SE is not (d_s d_e)-dimensional or g is
  /// not finite.
  CompositeModel(DriveProtocol drive, HermitianOperator env_hamiltonian, HermitianOperator coupling,
                 double g);

  const DriveProtocol& drive() const { return drive_; }
  const HermitianOperator& env_hamiltonian() const { return env_; }
  const HermitianOperator& coupling() const { return coupling_; }
  double g() const { return g_; }
  std::size_t dim_s() const { return drive_.dim(); }
  std::size_t dim_e() const { return env_.dim(); }

  CompositeModel with_coupling_scale(double g) const;

 private:
  DriveProtocol drive_;
  HermitianOperator env_;
  HermitianOperator coupling_;
  double g_;
};

/// Named qubit environments. All presets need a qubit system.
///   qubit-exchange  H_E = (w/2) sigma_z, H_SE = s+ (x) s- + s- (x) s+
///   qubit-xx        H_E = (w/2) sigma_z, H_SE = sigma_x (x) sigma_x
///   qubit-zx        H_E = (w/2) sigma_z, H_SE = sigma_z (x) sigma_x
///   oscillator      H_E = w a^dag a on `levels` Fock states, H_SE = sigma_x (x) (a + a^dag)
struct EnvironmentPreset {
  std::string name;
  HermitianOperator env_hamiltonian;
  HermitianOperator coupling;
};

EnvironmentPreset environment_preset(const std::string& name, std::size_t dim_s, double frequency,
                                     int levels = 4);
std::vector<std::string> environment_preset_names();

struct OpenRunOptions {
  /// Reset the environment to its initial state after every m-th step
  /// (collision mode). 0 disables the reset.
  int refresh_interval = 0;
};

HermitianOperator step_hamiltonian(const CompositeModel& model, int steps, int k);

/// exp(-i lambda H_S^k/2) exp(-i dt H^k) exp(i lambda H_S^k/2) for
/// 0 <= k < steps, with H_S^k lifted to the composite space.
UnitaryOperator measurement_block(const CompositeModel& model, int steps, int k, double lambda);

/// exp(i lambda H_S(T)/2) B^{N-1} ... B^0 exp(-i lambda H_S(0)/2).
UnitaryOperator full_counting_operator(const CompositeModel& model, int steps, double lambda);

/// The product of blocks alone, without boundary kicks.
UnitaryOperator block_product(const CompositeModel& model, int steps, double lambda);

/// G(lambda) = Tr[U_{lambda/2} (rho_S (x) rho_E) U_{-lambda/2}^dag]. In collision
/// mode the generalized density is propagated step by step instead.
CharacteristicSamples open_characteristic_function(const CompositeModel& model,
                                                   const DensityOperator& rho_s,
                                                   const DensityOperator& rho_e, int steps,
                                                   const CountingGrid& grid,
                                                   const OpenRunOptions& options = {});

/// Generating function of the heat Q: the block product evaluated at
/// -lambda, so that its first moment is +Q.
CharacteristicSamples heat_characteristic_function(const CompositeModel& model,
                                                   const DensityOperator& rho_s,
                                                   const DensityOperator& rho_e, int steps,
                                                   const CountingGrid& grid,
                                                   const OpenRunOptions& options = {});

struct LedgerStep {
  int k = 0;
  double time = 0.0;
  double heat = 0.0;            // Q_k, positive when absorbed by the system
  double entropy_change = 0.0;  // S(rho_S,k) - S(rho_S,k-1)
  double cumulative_heat = 0.0;
};

struct HeatLedger {
  std::vector<LedgerStep> steps;
  double heat = 0.0;
  double internal_energy_change = 0.0;
  double work = 0.0;             // internal_energy_change - heat
  double work_increments = 0.0;  // sum_k Tr[(H_S^{k+1} - H_S^k) rho_S,k]
  double max_abs_heat() const;
  /// |work_increments - (internal_energy_change - heat)|.
  double identity_residual() const;
};

HeatLedger heat_ledger(const CompositeModel& model, const DensityOperator& rho_s,
                       const DensityOperator& rho_e, int steps, const OpenRunOptions& options = {});

double work_via_increments(const CompositeModel& model, const DensityOperator& rho_s,
                           const DensityOperator& rho_e, int steps, const OpenRunOptions& options = {});

/// exp(i lambda H_E/2) U(T) exp(-i lambda H_E/2). Throws ValidationError unless
/// H_S is constant over the window.
UnitaryOperator environment_counting_operator(const CompositeModel& model, int steps, double lambda);

CharacteristicSamples environment_characteristic_function(const CompositeModel& model,
                                                          const DensityOperator& rho_s,
                                                          const DensityOperator& rho_e, int steps,
                                                          const CountingGrid& grid);

/// Tr[V(lambda) rho V(-lambda)^dag] with V(lambda) = exp(i lambda H_S(T)/2) U(T)
/// exp(-i lambda H_S(0)/2) on the composite space: the statistics of the
/// system energy change between the two ends, with no intermediate kicks.
CharacteristicSamples system_energy_characteristic_function(const CompositeModel& model,
                                                            const DensityOperator& rho_s,
                                                            const DensityOperator& rho_e, int steps,
                                                            const CountingGrid& grid);

/// max over the grid of |Gbar(lambda) - G_S(-lambda)|, where Gbar counts the
/// environment energy and G_S the system energy between the two ends.
double duality_deviation(const CompositeModel& model, const DensityOperator& rho_s,
                         const DensityOperator& rho_e, int steps, const CountingGrid& grid);

/// System re-thermalized to exp(-H_S^k/T)/Z after every step, starting from
/// the Gibbs state of H_S(0). Throws ValidationError for T <= 0.
HeatLedger fast_decoherence_run(const DriveProtocol& drive, double temperature, int steps);

/// -sum p log p over the eigenvalues, natural log.
double von_neumann_entropy(const DensityOperator& rho);

/// |Q_k - T dS_k| / max(|Q_k|, floor) for every step.
std::vector<double> entropy_relation_errors(const HeatLedger& ledger, double temperature,
                                            double floor = 1e-12);

}  // namespace qfcs
