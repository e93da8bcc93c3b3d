#pragma once

// Two-level cyclic evolution: a superposition cos(a)|e1> + sin(a)|e2> that
// the drive returns to itself up to the phase exp(i xi).

#include "qfcs/drive.hpp"
#include "qfcs/linalg.hpp"

namespace qfcs {

struct CyclicExampleParams {
  double alpha = 0.0;
  double xi = 0.0;
  double energy_gap = 1.0;  // e2 - e1
  double duration = 1.0;
};

/// [[cos xi + i cos2a sin xi, i sin2a sin xi], [i sin2a sin xi, cos xi - i cos2a sin xi]]
/// in the {|e1>, |e2>} basis.
Matrix cyclic_unitary_matrix(const CyclicExampleParams& p);
UnitaryOperator cyclic_unitary(const CyclicExampleParams& p);

/// diag(-gap/2, gap/2).
HermitianOperator cyclic_hamiltonian(const CyclicExampleParams& p);

/// cos(a)|e1> + sin(a)|e2>.
Vector floquet_state(const CyclicExampleParams& p);

/// One step whose propagator is the matrix above; both boundaries are the
/// static Hamiltonian.
DiscretizedDrive cyclic_drive(const CyclicExampleParams& p);

/// A piecewise drive realizing the same U(T): the static Hamiltonian on
/// [0, f T) and [(1 - f) T, T], a constant generator in between. Sampling is
/// exact when N f is an integer.
DriveProtocol cyclic_physical_protocol(const CyclicExampleParams& p, double edge_fraction = 0.25);

/// gap cos2a sin^2(2a) sin^2(xi): the two-measurement average.
double cyclic_tmp_average(const CyclicExampleParams& p);

/// The same expression with sin^2(2 xi) in place of sin^2(xi).
double cyclic_tmp_average_double_angle(const CyclicExampleParams& p);

}  // namespace qfcs
