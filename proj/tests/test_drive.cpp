#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qfcs/drive.hpp"
#include "qfcs/error.hpp"

using namespace qfcs;

namespace {

DriveProtocol real_symmetric_drive() {
  return DriveProtocol("real", 1.5, 2, [](double t) {
    return HermitianOperator{pauli::z() + 0.7 * std::sin(2.0 * t) * pauli::x()};
  });
}

double trotter_gap(const DriveProtocol& p, int n) {
  return max_abs(evolution_operator(discretize(p, n)).matrix() - evolution_operator(discretize(p, 2 * n)).matrix());
}

}  // namespace

TEST(Discretize, ConstantFourSteps) {
  const HermitianOperator h{pauli::x()};
  const DiscretizedDrive d = discretize(DriveProtocol::constant(h, 2.0), 4);
  ASSERT_EQ(d.step_count(), 4u);
  EXPECT_DOUBLE_EQ(d.dt(), 0.5);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_DOUBLE_EQ(d.steps()[k].time, 0.5 * k);
    EXPECT_EQ(max_abs(d.steps()[k].hamiltonian.matrix() - h.matrix()), 0.0);
  }
}

TEST(Discretize, LinearRampTwoSteps) {
  const DriveProtocol p =
      DriveProtocol::linear_ramp(HermitianOperator{pauli::z()}, HermitianOperator{pauli::x()}, 3.0);
  const DiscretizedDrive d = discretize(p, 2);
  EXPECT_DOUBLE_EQ(d.steps()[0].time, 0.0);
  EXPECT_DOUBLE_EQ(d.steps()[1].time, 1.5);
  EXPECT_LE(max_abs(d.steps()[1].hamiltonian.matrix() - 0.5 * (pauli::z() + pauli::x())), 1e-15);
  EXPECT_LE(max_abs(d.final_hamiltonian().matrix() - pauli::x()), 1e-15);
  EXPECT_LE(max_abs(d.initial_hamiltonian().matrix() - pauli::z()), 1e-15);
}

TEST(Discretize, NestedGrids) {
  const DriveProtocol p = DriveProtocol::rabi(1.0, 0.5, 1.0, 1.0);
  const DiscretizedDrive a = discretize(p, 8), b = discretize(p, 16);
  for (std::size_t k = 0; k < 8; ++k) {
    EXPECT_NEAR(a.steps()[k].time, b.steps()[2 * k].time, 1e-15);
    EXPECT_LE(max_abs(a.steps()[k].hamiltonian.matrix() - b.steps()[2 * k].hamiltonian.matrix()), 1e-15);
  }
}

TEST(Discretize, Errors) {
  const DriveProtocol p = DriveProtocol::rabi(1.0, 0.5, 1.0, 1.0);
  EXPECT_THROW(discretize(p, 0), ValidationError);
  EXPECT_THROW(p.hamiltonian_at(1.5), ValidationError);
  const DriveProtocol wrong("wrong", 1.0, 2, [](double) { return HermitianOperator::zero(3); });
  EXPECT_THROW(discretize(wrong, 2), ValidationError);
}

TEST(Evolution, ConstantIsExact) {
  const HermitianOperator h{pauli::x() + 0.3 * pauli::z()};
  const Matrix exact = oracle::taylor_expm(h.matrix(), 1.7);
  for (int n : {1, 3, 17}) {
    EXPECT_LE(max_abs(evolution_operator(discretize(DriveProtocol::constant(h, 1.7), n)).matrix() - exact), 1e-12);
  }
}

TEST(Evolution, TwoStepOrder) {
  const DriveProtocol p = DriveProtocol::piecewise({0.0, 0.4, 0.8},
                                                   {HermitianOperator{pauli::z()}, HermitianOperator{pauli::x()}});
  const Matrix expect = oracle::taylor_expm(pauli::x(), 0.4) * oracle::taylor_expm(pauli::z(), 0.4);
  EXPECT_LE(max_abs(evolution_operator(discretize(p, 2)).matrix() - expect), 1e-12);
}

TEST(Evolution, MatchesOrderedTaylorProduct) {
  const DiscretizedDrive d = discretize(DriveProtocol::rabi(1.0, 0.5, 1.0, 1.0), 32);
  std::vector<Matrix> steps;
  for (const auto& s : d.steps()) steps.push_back(s.hamiltonian.matrix());
  EXPECT_LE(max_abs(evolution_operator(d).matrix() - oracle::ordered_product(steps, d.dt())), 1e-12);
}

TEST(Evolution, RabiSelfConvergenceFirstOrder) {
  const DriveProtocol p = DriveProtocol::rabi(1.0, 0.5, 1.0, 1.0);
  const double gap = max_abs(evolution_operator(discretize(p, 256)).matrix() -
                             evolution_operator(discretize(p, 4096)).matrix());
  EXPECT_GT(gap, 0.0);
  EXPECT_LE(gap * 256, 1.0);
  const double r1 = trotter_gap(p, 256) / trotter_gap(p, 512);
  const double r2 = trotter_gap(p, 512) / trotter_gap(p, 1024);
  EXPECT_GE(r1, 1.7);
  EXPECT_LE(r1, 2.3);
  EXPECT_GE(r2, 1.7);
  EXPECT_LE(r2, 2.3);
}

// For real symmetric steps the reversed protocol produces the transpose of
// the forward operator (the adjoint would also flip the sign of time).
TEST(Evolution, TimeReversalGivesTranspose) {
  const DriveProtocol p = real_symmetric_drive();
  const DriveProtocol rev = DriveProtocol::time_reversed(p);
  double previous = 1.0;
  for (int n : {128, 256, 512}) {
    const Matrix u = evolution_operator(discretize(p, n)).matrix();
    const Matrix ur = evolution_operator(discretize(rev, n)).matrix();
    const double gap = max_abs(ur - u.transpose());
    EXPECT_LT(gap, previous);
    EXPECT_LE(gap * n, 2.0);
    previous = gap;
  }
  const Matrix u = evolution_operator(discretize(p, 512)).matrix();
  const Matrix ur = evolution_operator(discretize(rev, 512)).matrix();
  EXPECT_GT(max_abs(ur - u.adjoint()), 0.1);
}

TEST(Evolution, ReversedHamiltonianSamples) {
  const DriveProtocol p = DriveProtocol::rabi(1.0, 0.5, 1.0, 2.0);
  const DriveProtocol rev = DriveProtocol::time_reversed(p);
  EXPECT_LE(max_abs(rev.hamiltonian_at(0.5).matrix() - p.hamiltonian_at(1.5).matrix()), 1e-15);
}

TEST(StepChoice, ConvergesForRabi) {
  const StepChoice c = choose_step_count(DriveProtocol::rabi(1.0, 0.5, 1.0, 1.0), 1e-6);
  EXPECT_TRUE(c.converged);
  EXPECT_LE(c.estimate, 1e-6);
  EXPECT_EQ(c.steps & (c.steps - 1), 0);
  const StepChoice capped = choose_step_count(DriveProtocol::rabi(1.0, 0.5, 1.0, 1.0), 1e-12, 1, 64);
  EXPECT_FALSE(capped.converged);
}

TEST(Drive, GapRamp) {
  const DriveProtocol p = DriveProtocol::gap_ramp(1.0, 1.5, 2.0);
  EXPECT_LE(max_abs(p.hamiltonian_at(1.0).matrix() - 0.625 * pauli::z()), 1e-15);
}
