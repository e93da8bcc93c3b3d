#pragma once

// Two-measurement protocol: projective energy measurements at t = 0 and
// t = T, and the resulting (classical) work statistics.

#include <span>
#include <vector>

#include "qfcs/drive.hpp"
#include "qfcs/fcs_closed.hpp"
#include "qfcs/linalg.hpp"

namespace qfcs {

/// One (initial level, final level) outcome. Levels are distinct eigenvalues;
/// degenerate eigenvectors share a level.
struct TmpOutcome {
  int i = 0;
  int k = 0;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double probability = 0.0;
  double work = 0.0;
};

struct TmpOptions {
  /// Eigenvalues closer than level_tol * max(1, |spectrum|) form one level.
  double level_tol = 1e-9;
  /// Outcomes with probability below this are dropped.
  double prune = 1e-14;
};

struct EnergyLevel {
  double energy = 0.0;
  Matrix projector;
};

/// Spectral projectors of H, one per distinct eigenvalue, ascending.
std::vector<EnergyLevel> energy_levels(const HermitianOperator& h, double level_tol = 1e-9);

/// p(i, k) = Tr[Q_k U P_i rho P_i U^dag] with P_i, Q_k the spectral projectors
/// of H_S(0) and H_S(T).
std::vector<TmpOutcome> tmp_distribution(const DensityOperator& rho, const DiscretizedDrive& d,
                                         const TmpOptions& options = {});

double tmp_average(std::span<const TmpOutcome> outcomes);
double tmp_moment(std::span<const TmpOutcome> outcomes, int n);

/// sum_p probability * exp(i lambda work) on the grid.
CharacteristicSamples tmp_characteristic(std::span<const TmpOutcome> outcomes, const CountingGrid& grid);

/// Work distribution; outcomes with works within bin_tol share a bin.
QuasiDistribution tmp_work_distribution(std::span<const TmpOutcome> outcomes, double bin_tol);

/// rho with its coherences between distinct H levels removed.
DensityOperator dephase(const DensityOperator& rho, const HermitianOperator& h, double level_tol = 1e-9);

}  // namespace qfcs
