#pragma once

// Dense complex linear algebra for small Hilbert spaces. Energies and times
// are dimensionless with hbar = k_B = 1.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

namespace qfcs {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Structural tolerances checked when operators are constructed.
struct Tolerances {
  double hermitian_rel = 1e-12;  // ||M - M^dag||_max <= tol * ||M||_max
  double unitary = 1e-10;        // ||U^dag U - 1||_max
  double trace = 1e-12;          // |Tr rho - 1|
  double positivity = 1e-10;     // smallest eigenvalue >= -tol
};

double max_abs(const Matrix& m);
bool all_finite(const Matrix& m);
Matrix identity(std::size_t dim);

class HermitianOperator {
 public:
  /// Throws ValidationError when `m` is not square, has non-finite entries,
  /// or deviates from Hermiticity beyond `tol.hermitian_rel`. The stored
  /// matrix is the Hermitian part of `m`.
  explicit HermitianOperator(const Matrix& m, const Tolerances& tol = {});

  static HermitianOperator zero(std::size_t dim);
  static HermitianOperator diagonal(const RealVector& values);

  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator-(const HermitianOperator& other) const;
  HermitianOperator scaled(double factor) const;
  /// c * identity added to the operator.
  HermitianOperator shifted(double c) const;

 private:
  struct Unchecked {};
  HermitianOperator(Matrix m, Unchecked) : m_(std::move(m)) {}
  Matrix m_;
};

class UnitaryOperator {
 public:
  /// Throws ValidationError when `m` is not square or not unitary to
  /// `tol.unitary`.
  explicit UnitaryOperator(const Matrix& m, const Tolerances& tol = {});

  static UnitaryOperator identity(std::size_t dim);

  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

  UnitaryOperator adjoint() const;
  UnitaryOperator operator*(const UnitaryOperator& rhs) const;

 private:
  Matrix m_;
};

class DensityOperator {
 public:
  /// Throws ValidationError unless `m` is Hermitian, unit-trace and positive
  /// semidefinite to the given tolerances.
  explicit DensityOperator(const Matrix& m, const Tolerances& tol = {});

  /// |psi><psi| for a (not necessarily normalized) nonzero vector.
  static DensityOperator pure(const Vector& psi);
  static DensityOperator maximally_mixed(std::size_t dim);
  /// exp(-H/T)/Z; throws ValidationError for T <= 0.
  static DensityOperator gibbs(const HermitianOperator& h, double temperature);

  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  Matrix m_;
};

/// Spectral decomposition H = V diag(values) V^dag. Eigenvalues ascend; each
/// eigenvector's largest-magnitude component (first one on ties) is real
/// positive.
struct EigenSystem {
  RealVector values;
  UnitaryOperator vectors;
};

EigenSystem eig_hermitian(const HermitianOperator& h);

/// exp(-i t H), built from the spectral decomposition.
UnitaryOperator expm_unitary(const HermitianOperator& h, double t);
UnitaryOperator expm_unitary(const EigenSystem& eig, double t);

/// Kronecker product, system index major: (A (x) B)[(i*nb + k), (j*mb + l)].
Matrix tensor(const Matrix& a, const Matrix& b);
HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);
UnitaryOperator tensor(const UnitaryOperator& a, const UnitaryOperator& b);

/// Trace over the second (environment) factor of a dim_s*dim_e square matrix.
Matrix partial_trace_env(const Matrix& m, std::size_t dim_s, std::size_t dim_e);

/// Hermitian K with exp(-i tau K) = u, using principal eigenphases in (-pi, pi].
HermitianOperator hermitian_generator(const UnitaryOperator& u, double tau);

namespace pauli {
Matrix x();
Matrix y();
Matrix z();
Matrix raising();   // sigma_+ = |0><1|
Matrix lowering();  // sigma_- = |1><0|
}  // namespace pauli

}  // namespace qfcs
