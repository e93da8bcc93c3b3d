#pragma once

// Brute-force path sums over small instances. A path picks one eigenstate
// of A_k at every insertion time t_0, ..., t_N; its amplitude is the product
// of the propagator matrix elements between consecutive picks.

#include <cstddef>
#include <string>
#include <vector>

#include "qfcs/drive.hpp"
#include "qfcs/linalg.hpp"

namespace qfcs {

/// F[path] = dt * sum_k weights[k] * a_{i_k}^k with one observable per
/// insertion time, N + 1 in total (the last one sits at t = T).
struct PathFunctional {
  std::vector<HermitianOperator> observables;
  std::vector<double> weights;
};

struct PathRecord {
  std::vector<int> indices;
  Complex amplitude{};
  double functional = 0.0;
};

inline constexpr double kMaxPaths = 1e6;

/// <psi_T|a_N><a_N|E_{N-1}|a_{N-1}> ... <a_1|E_0|a_0><a_0|psi_0> for every
/// index tuple, in lexicographic order (i_0 slowest). Throws ValidationError
/// when d^(N+1) exceeds kMaxPaths or the functional has the wrong shape.
std::vector<PathRecord> enumerate_paths(const DiscretizedDrive& d, const PathFunctional& f,
                                        const Vector& psi0, const Vector& psi_t);

Complex path_sum(const std::vector<PathRecord>& paths);

/// sum exp(i lambda F) amplitude.
Complex counting_weighted_sum(const std::vector<PathRecord>& paths, double lambda);

/// exp(i lambda dt b_N A_N) prod_{k<N} exp(-i dt (H_k - lambda b_k A_k)),
/// latest factor leftmost.
UnitaryOperator kicked_product(const DiscretizedDrive& d, const PathFunctional& f, double lambda);

enum class DeltaConvention {
  /// -1/dt at t_0 and +1/dt on the terminal insertion at t = T.
  terminal,
  /// -1/dt at t_0 and +1/dt on the last step [t_{N-1}, T).
  last_interval,
};

DeltaConvention parse_delta_convention(const std::string& name);

/// Observables H_S(t_k) (and H_S(T) at the terminal insertion) with the
/// boundary weights of the chosen convention. For the terminal convention the
/// counting-weighted sum equals the two-kick element at 2 lambda exactly.
PathFunctional boundary_delta_functional(const DiscretizedDrive& d, DeltaConvention convention);

/// One observable repeated at every insertion with constant weight.
PathFunctional uniform_functional(const HermitianOperator& a, std::size_t steps, double weight);

}  // namespace qfcs
