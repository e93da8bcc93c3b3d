#include "qfcs/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

#include "qfcs/error.hpp"

namespace qfcs {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw ValidationError(os.str());
  }
  if (!all_finite(m)) {
    throw ValidationError(std::string(what) + ": matrix has non-finite entries");
  }
}

}  // namespace

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool all_finite(const Matrix& m) {
  return m.allFinite();
}

Matrix identity(std::size_t dim) {
  return Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

// ---------------------------------------------------------------------------
// HermitianOperator

HermitianOperator::HermitianOperator(const Matrix& m, const Tolerances& tol) {
  require_square(m, "HermitianOperator");
  const double scale = max_abs(m);
  const double asym = max_abs(m - m.adjoint());
  if (asym > tol.hermitian_rel * scale) {
    std::ostringstream os;
    os << "HermitianOperator: ||M - M^dag||_max = " << asym << " exceeds " << tol.hermitian_rel
       << " * ||M||_max = " << tol.hermitian_rel * scale;
    throw ValidationError(os.str());
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::zero(std::size_t dim) {
  return HermitianOperator(Matrix::Zero(dim, dim), Unchecked{});
}

HermitianOperator HermitianOperator::diagonal(const RealVector& values) {
  if (values.size() < 1 || !values.allFinite()) {
    throw ValidationError("HermitianOperator::diagonal: need finite, non-empty values");
  }
  return HermitianOperator(Matrix(values.cast<Complex>().asDiagonal()), Unchecked{});
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
  if (other.dim() != dim()) throw ValidationError("HermitianOperator +: dimension mismatch");
  return HermitianOperator(m_ + other.m_, Unchecked{});
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
  if (other.dim() != dim()) throw ValidationError("HermitianOperator -: dimension mismatch");
  return HermitianOperator(m_ - other.m_, Unchecked{});
}

HermitianOperator HermitianOperator::scaled(double factor) const {
  if (!std::isfinite(factor)) throw ValidationError("HermitianOperator::scaled: non-finite factor");
  return HermitianOperator(m_ * factor, Unchecked{});
}

HermitianOperator HermitianOperator::shifted(double c) const {
  if (!std::isfinite(c)) throw ValidationError("HermitianOperator::shifted: non-finite shift");
  return HermitianOperator(m_ + c * identity(dim()), Unchecked{});
}

// ---------------------------------------------------------------------------
// UnitaryOperator

UnitaryOperator::UnitaryOperator(const Matrix& m, const Tolerances& tol) {
  require_square(m, "UnitaryOperator");
  const double defect = max_abs(m.adjoint() * m - qfcs::identity(static_cast<std::size_t>(m.rows())));
  if (defect > tol.unitary) {
    std::ostringstream os;
    os << "UnitaryOperator: ||U^dag U - 1||_max = " << defect << " exceeds " << tol.unitary;
    throw ValidationError(os.str());
  }
  m_ = m;
}

UnitaryOperator UnitaryOperator::identity(std::size_t dim) {
  return UnitaryOperator(qfcs::identity(dim));
}

UnitaryOperator UnitaryOperator::adjoint() const {
  return UnitaryOperator(m_.adjoint());
}

UnitaryOperator UnitaryOperator::operator*(const UnitaryOperator& rhs) const {
  if (rhs.dim() != dim()) throw ValidationError("UnitaryOperator *: dimension mismatch");
  return UnitaryOperator(m_ * rhs.m_);
}

// ---------------------------------------------------------------------------
// DensityOperator

DensityOperator::DensityOperator(const Matrix& m, const Tolerances& tol) {
  require_square(m, "DensityOperator");
  const double asym = max_abs(m - m.adjoint());
  if (asym > tol.hermitian_rel) {
    std::ostringstream os;
    os << "DensityOperator: not Hermitian, ||rho - rho^dag||_max = " << asym;
    throw ValidationError(os.str());
  }
  const Complex tr = m.trace();
  if (std::abs(tr - 1.0) > tol.trace) {
    std::ostringstream os;
    os << "DensityOperator: trace " << tr << " differs from 1 by more than " << tol.trace;
    throw ValidationError(os.str());
  }
  Matrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("DensityOperator: eigenvalue solver failed");
  }
  const double min_ev = solver.eigenvalues().minCoeff();
  if (min_ev < -tol.positivity) {
    std::ostringstream os;
    os << "DensityOperator: smallest eigenvalue " << min_ev << " below -" << tol.positivity;
    throw ValidationError(os.str());
  }
  m_ = std::move(herm);
}

DensityOperator DensityOperator::pure(const Vector& psi) {
  if (psi.size() < 1 || !psi.allFinite()) throw ValidationError("DensityOperator::pure: bad vector");
  const double norm = psi.norm();
  if (norm <= 0.0) throw ValidationError("DensityOperator::pure: zero vector");
  const Vector v = psi / norm;
  return DensityOperator(v * v.adjoint());
}

DensityOperator DensityOperator::maximally_mixed(std::size_t dim) {
  if (dim < 1) throw ValidationError("DensityOperator::maximally_mixed: dim must be >= 1");
  return DensityOperator(identity(dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::gibbs(const HermitianOperator& h, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ValidationError("gibbs: temperature must be positive and finite");
  }
  const EigenSystem eig = eig_hermitian(h);
  const double e0 = eig.values.minCoeff();
  RealVector p = ((eig.values.array() - e0) * (-1.0 / temperature)).exp();
  p /= p.sum();
  const Matrix& v = eig.vectors.matrix();
  return DensityOperator(v * p.cast<Complex>().asDiagonal() * v.adjoint());
}

// ---------------------------------------------------------------------------
// Spectral functions

EigenSystem eig_hermitian(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eig_hermitian: solver did not converge (dim " << h.dim() << ", ||H||_max "
       << max_abs(h.matrix()) << ")";
    throw NumericalError(os.str());
  }
  Matrix v = solver.eigenvectors();
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    const double peak = v.col(c).cwiseAbs().maxCoeff();
    Eigen::Index pivot = 0;
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      if (std::abs(v(r, c)) >= peak * (1.0 - 1e-10)) {
        pivot = r;
        break;
      }
    }
    const Complex phase = std::conj(v(pivot, c)) / std::abs(v(pivot, c));
    v.col(c) *= phase;
    v(pivot, c) = std::abs(v(pivot, c));
  }
  return EigenSystem{solver.eigenvalues(), UnitaryOperator(v)};
}

UnitaryOperator expm_unitary(const EigenSystem& eig, double t) {
  const Matrix& v = eig.vectors.matrix();
  Vector phases(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    phases(i) = std::exp(-kI * eig.values(i) * t);
  }
  return UnitaryOperator(v * phases.asDiagonal() * v.adjoint());
}

UnitaryOperator expm_unitary(const HermitianOperator& h, double t) {
  return expm_unitary(eig_hermitian(h), t);
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(tensor(a.matrix(), b.matrix()));
}

UnitaryOperator tensor(const UnitaryOperator& a, const UnitaryOperator& b) {
  return UnitaryOperator(tensor(a.matrix(), b.matrix()));
}

Matrix partial_trace_env(const Matrix& m, std::size_t dim_s, std::size_t dim_e) {
  const auto ds = static_cast<Eigen::Index>(dim_s);
  const auto de = static_cast<Eigen::Index>(dim_e);
  if (dim_s < 1 || dim_e < 1 || m.rows() != ds * de || m.cols() != ds * de) {
    std::ostringstream os;
    os << "partial_trace_env: matrix is " << m.rows() << "x" << m.cols() << ", expected "
       << ds * de << "x" << ds * de;
    throw ValidationError(os.str());
  }
  Matrix out = Matrix::Zero(ds, ds);
  for (Eigen::Index i = 0; i < ds; ++i) {
    for (Eigen::Index j = 0; j < ds; ++j) {
      out(i, j) = m.block(i * de, j * de, de, de).trace();
    }
  }
  return out;
}

HermitianOperator hermitian_generator(const UnitaryOperator& u, double tau) {
  if (!(tau > 0.0)) throw ValidationError("hermitian_generator: tau must be positive");
  Eigen::ComplexSchur<Matrix> schur(u.matrix());
  if (schur.info() != Eigen::Success) throw NumericalError("hermitian_generator: Schur failed");
  const Matrix& t = schur.matrixT();
  const Matrix& z = schur.matrixU();
  // A unitary matrix is normal, so its Schur form is diagonal.
  Matrix off = t;
  off.diagonal().setZero();
  if (max_abs(off) > 1e-9) throw NumericalError("hermitian_generator: Schur form not diagonal");
  RealVector k(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) k(i) = -std::arg(t(i, i)) / tau;
  return HermitianOperator(z * k.cast<Complex>().asDiagonal() * z.adjoint());
}

namespace pauli {
Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix y() {
  Matrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}
Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
Matrix raising() {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  return m;
}
Matrix lowering() {
  Matrix m(2, 2);
  m << 0, 0, 1, 0;
  return m;
}
}  // namespace pauli

}  // namespace qfcs
