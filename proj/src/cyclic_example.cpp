#include "qfcs/cyclic_example.hpp"

#include <cmath>

#include "qfcs/error.hpp"

namespace qfcs {

namespace {

void check(const CyclicExampleParams& p) {
  if (!std::isfinite(p.alpha) || !std::isfinite(p.xi) || !std::isfinite(p.energy_gap)) {
    throw ValidationError("cyclic example: alpha, xi and dE must be finite");
  }
  if (!(p.duration > 0.0)) throw ValidationError("cyclic example: duration must be positive");
}

}  // namespace

Matrix cyclic_unitary_matrix(const CyclicExampleParams& p) {
  check(p);
  const double c2 = std::cos(2.0 * p.alpha);
  const double s2 = std::sin(2.0 * p.alpha);
  const double cx = std::cos(p.xi);
  const double sx = std::sin(p.xi);
  Matrix u(2, 2);
  u << Complex(cx, c2 * sx), Complex(0.0, s2 * sx),
       Complex(0.0, s2 * sx), Complex(cx, -c2 * sx);
  return u;
}

UnitaryOperator cyclic_unitary(const CyclicExampleParams& p) {
  return UnitaryOperator(cyclic_unitary_matrix(p));
}

HermitianOperator cyclic_hamiltonian(const CyclicExampleParams& p) {
  check(p);
  RealVector e(2);
  e << -0.5 * p.energy_gap, 0.5 * p.energy_gap;
  return HermitianOperator::diagonal(e);
}

Vector floquet_state(const CyclicExampleParams& p) {
  check(p);
  Vector v(2);
  v << std::cos(p.alpha), std::sin(p.alpha);
  return v;
}

DiscretizedDrive cyclic_drive(const CyclicExampleParams& p) {
  return single_step_drive(cyclic_unitary(p), cyclic_hamiltonian(p), p.duration, "cyclic-example");
}

DriveProtocol cyclic_physical_protocol(const CyclicExampleParams& p, double edge_fraction) {
  if (!(edge_fraction > 0.0 && edge_fraction < 0.5)) {
    throw ValidationError("cyclic_physical_protocol: edge fraction must lie in (0, 1/2)");
  }
  const HermitianOperator h0 = cyclic_hamiltonian(p);
  const double edge = edge_fraction * p.duration;
  const double middle = p.duration - 2.0 * edge;
  // exp(-i edge H0) exp(-i middle K) exp(-i edge H0) = U
  const Matrix undo = expm_unitary(h0, -edge).matrix();
  const UnitaryOperator inner(undo * cyclic_unitary_matrix(p) * undo);
  const HermitianOperator k = hermitian_generator(inner, middle);
  return DriveProtocol::piecewise({0.0, edge, p.duration - edge, p.duration}, {h0, k, h0},
                                  "cyclic-piecewise");
}

double cyclic_tmp_average(const CyclicExampleParams& p) {
  const double s2 = std::sin(2.0 * p.alpha);
  const double sx = std::sin(p.xi);
  return p.energy_gap * std::cos(2.0 * p.alpha) * s2 * s2 * sx * sx;
}

double cyclic_tmp_average_double_angle(const CyclicExampleParams& p) {
  const double s2 = std::sin(2.0 * p.alpha);
  const double sx = std::sin(2.0 * p.xi);
  return p.energy_gap * std::cos(2.0 * p.alpha) * s2 * s2 * sx * sx;
}

}  // namespace qfcs
