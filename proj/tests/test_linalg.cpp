#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qfcs/error.hpp"
#include "qfcs/linalg.hpp"

using namespace qfcs;

TEST(Operators, RejectNonHermitian) {
  Matrix m(2, 2);
  m << 1, 1, 0, 1;
  EXPECT_THROW(HermitianOperator{m}, ValidationError);
  EXPECT_THROW(HermitianOperator{Matrix(2, 3)}, ValidationError);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(HermitianOperator{bad}, ValidationError);
}

TEST(Operators, RejectNonUnitary) {
  EXPECT_THROW(UnitaryOperator{Matrix(2, 2) * 0.0 + 2.0 * Matrix::Identity(2, 2)}, ValidationError);
  EXPECT_NO_THROW(UnitaryOperator{pauli::x()});
}

TEST(Operators, DensityInvariants) {
  Matrix m = Matrix::Identity(2, 2);
  EXPECT_THROW(DensityOperator{m}, ValidationError);  // trace 2
  Matrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  EXPECT_THROW(DensityOperator{neg}, ValidationError);
  EXPECT_NO_THROW(DensityOperator{m / 2.0});
  EXPECT_THROW(DensityOperator::gibbs(HermitianOperator{pauli::z()}, 0.0), ValidationError);
}

TEST(EigHermitian, PauliZ) {
  const EigenSystem e = eig_hermitian(HermitianOperator{pauli::z()});
  EXPECT_NEAR(e.values(0), -1.0, 1e-14);
  EXPECT_NEAR(e.values(1), 1.0, 1e-14);
  const Matrix& v = e.vectors.matrix();
  EXPECT_NEAR(std::abs(v(1, 0) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(v(0, 1) - 1.0), 0.0, 1e-14);
}

TEST(EigHermitian, PauliX) {
  const EigenSystem e = eig_hermitian(HermitianOperator{pauli::x()});
  EXPECT_NEAR(e.values(0), -1.0, 1e-14);
  EXPECT_NEAR(e.values(1), 1.0, 1e-14);
  const Matrix& v = e.vectors.matrix();
  const double r = 1.0 / std::sqrt(2.0);
  // Largest component real positive; on ties the first one.
  EXPECT_NEAR(std::abs(v(0, 0) - r), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(v(1, 0) + r), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(v(0, 1) - r), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(v(1, 1) - r), 0.0, 1e-14);
}

TEST(EigHermitian, RandomReconstructionAndPhase) {
  std::mt19937_64 rng(11);
  const Matrix h = oracle::random_hermitian(rng, 8);
  const EigenSystem e = eig_hermitian(HermitianOperator{h});
  const Matrix& v = e.vectors.matrix();
  EXPECT_LE(oracle::max_abs(v * e.values.cast<Complex>().asDiagonal() * v.adjoint() - h), 1e-10);
  for (int i = 1; i < e.values.size(); ++i) EXPECT_LE(e.values(i - 1), e.values(i));
  for (int c = 0; c < v.cols(); ++c) {
    Eigen::Index r = 0;
    v.col(c).cwiseAbs().maxCoeff(&r);
    EXPECT_NEAR(v(r, c).imag(), 0.0, 1e-14);
    EXPECT_GT(v(r, c).real(), 0.0);
  }
}

TEST(EigHermitian, UnitaryInvariance) {
  std::mt19937_64 rng(12);
  const Matrix h = oracle::random_hermitian(rng, 5);
  const Matrix u = oracle::taylor_expm(oracle::random_hermitian(rng, 5), 1.0);
  const RealVector a = eig_hermitian(HermitianOperator{h}).values;
  const RealVector b = eig_hermitian(HermitianOperator{u.adjoint() * h * u}).values;
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Expm, ZeroIsIdentity) {
  EXPECT_LE(max_abs(expm_unitary(HermitianOperator::zero(3), 2.7).matrix() - identity(3)), 1e-15);
}

TEST(Expm, PauliXQuarterTurn) {
  const Matrix u = expm_unitary(HermitianOperator{pauli::x()}, std::numbers::pi / 2).matrix();
  EXPECT_LE(max_abs(u - (-kI) * pauli::x()), 1e-14);
}

TEST(Expm, MatchesTaylorSeries) {
  std::mt19937_64 rng(13);
  const Matrix h = oracle::random_hermitian(rng, 4);
  EXPECT_LE(max_abs(expm_unitary(HermitianOperator{h}, 0.3).matrix() - oracle::taylor_expm(h, 0.3)), 1e-10);
}

TEST(Expm, GroupProperty) {
  std::mt19937_64 rng(14);
  const HermitianOperator h{oracle::random_hermitian(rng, 4)};
  const Matrix lhs = expm_unitary(h, 0.4).matrix() * expm_unitary(h, -1.1).matrix();
  EXPECT_LE(max_abs(lhs - expm_unitary(h, -0.7).matrix()), 1e-10);
}

TEST(Tensor, Identities) {
  EXPECT_LE(max_abs(tensor(identity(2), identity(2)) - identity(4)), 0.0);
  Matrix expect = Matrix::Zero(4, 4);
  expect.diagonal() << 1, 1, -1, -1;
  EXPECT_LE(max_abs(tensor(pauli::z(), identity(2)) - expect), 0.0);
}

TEST(Tensor, MixedProduct) {
  std::mt19937_64 rng(15);
  const Matrix a = oracle::random_hermitian(rng, 2), b = oracle::random_hermitian(rng, 2);
  const Matrix c = oracle::random_hermitian(rng, 2), d = oracle::random_hermitian(rng, 2);
  EXPECT_LE(max_abs(tensor(a, b) * tensor(c, d) - tensor(a * c, b * d)), 1e-12);
  EXPECT_LE(max_abs(tensor(a, b) - oracle::kron(a, b)), 0.0);
}

TEST(PartialTrace, ProductState) {
  std::mt19937_64 rng(16);
  const Matrix rs = oracle::random_density(rng, 3), re = oracle::random_density(rng, 2);
  EXPECT_LE(max_abs(partial_trace_env(tensor(rs, re), 3, 2) - rs), 1e-12);
}

TEST(PartialTrace, BellState) {
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  EXPECT_LE(max_abs(partial_trace_env(phi * phi.adjoint(), 2, 2) - identity(2) / 2.0), 1e-15);
}

TEST(PartialTrace, TraceChainAndLinearity) {
  std::mt19937_64 rng(17);
  const Matrix m = oracle::random_hermitian(rng, 8) + kI * oracle::random_hermitian(rng, 8);
  const Matrix n = oracle::random_hermitian(rng, 8);
  EXPECT_NEAR(std::abs(partial_trace_env(m, 2, 4).trace() - m.trace()), 0.0, 1e-12);
  const Complex a{0.3, -1.2};
  const double b = 2.5;
  const Matrix lhs = partial_trace_env(a * m + b * n, 4, 2);
  const Matrix rhs = a * partial_trace_env(m, 4, 2) + b * partial_trace_env(n, 4, 2);
  EXPECT_LE(max_abs(lhs - rhs), 1e-12);
  EXPECT_THROW(partial_trace_env(m, 3, 2), ValidationError);
}

TEST(Generator, RoundTrip) {
  std::mt19937_64 rng(18);
  const Matrix u = oracle::taylor_expm(oracle::random_hermitian(rng, 3), 0.8);
  const HermitianOperator k = hermitian_generator(UnitaryOperator{u}, 2.0);
  EXPECT_LE(max_abs(expm_unitary(k, 2.0).matrix() - u), 1e-12);
}

TEST(Gibbs, QubitPopulations) {
  const DensityOperator rho = DensityOperator::gibbs(HermitianOperator{pauli::z()}, 0.5);
  const double p = 1.0 / (1.0 + std::exp(-4.0));
  EXPECT_NEAR(rho.matrix()(1, 1).real(), p, 1e-14);
  EXPECT_NEAR(rho.matrix()(0, 0).real(), 1.0 - p, 1e-14);
}
