#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qfcs/cyclic_example.hpp"
#include "qfcs/error.hpp"
#include "qfcs/fcs_closed.hpp"
#include "qfcs/tmp.hpp"

using namespace qfcs;

namespace {

DriveProtocol random_drive(std::mt19937_64& rng, int dim, double duration = 1.0) {
  const Matrix a = oracle::random_hermitian(rng, dim);
  const Matrix b = oracle::random_hermitian(rng, dim, 0.5);
  const Matrix c = oracle::random_hermitian(rng, dim, 0.3);
  return DriveProtocol("random", duration, static_cast<std::size_t>(dim),
                       [=](double t) { return HermitianOperator{a + std::cos(2.0 * t) * b + t * c}; });
}

// exp(i s H)
Matrix kick(const HermitianOperator& h, double s) { return oracle::taylor_expm(h.matrix(), -s); }

}  // namespace

TEST(CountingGrid, Validation) {
  EXPECT_THROW(CountingGrid({-1.0, 1.0}), ValidationError);
  EXPECT_THROW(CountingGrid({-1.0, 0.0, 2.0}), ValidationError);
  EXPECT_THROW(CountingGrid::symmetric(1.0, 4), ValidationError);
  const CountingGrid g = CountingGrid::symmetric(2.0, 5);
  EXPECT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.spacing(), 1.0);
  EXPECT_TRUE(g.find(-1.0, 1e-12).has_value());
}

TEST(TwoKick, ZeroFieldIsEvolution) {
  std::mt19937_64 rng(1);
  const DiscretizedDrive d = discretize(random_drive(rng, 3), 20);
  EXPECT_LE(max_abs(two_kick_propagator(d, 0.0).matrix() - evolution_operator(d).matrix()), 1e-14);
}

TEST(TwoKick, ConstantHamiltonianCommutes) {
  const HermitianOperator h{pauli::x() + 0.4 * pauli::z()};
  const DiscretizedDrive d = discretize(DriveProtocol::constant(h, 1.3), 5);
  EXPECT_LE(max_abs(two_kick_propagator(d, 0.9).matrix() - evolution_operator(d).matrix()), 1e-12);
}

TEST(TwoKick, ExplicitProduct) {
  std::mt19937_64 rng(2);
  const DiscretizedDrive d = discretize(random_drive(rng, 2), 16);
  const double lambda = 0.7;
  const Matrix expect =
      kick(d.final_hamiltonian(), lambda / 2) * evolution_operator(d).matrix() * kick(d.initial_hamiltonian(), -lambda / 2);
  EXPECT_LE(max_abs(two_kick_propagator(d, lambda).matrix() - expect), 1e-12);
}

TEST(Characteristic, EigenstateOfConstantDrive) {
  const HermitianOperator h{pauli::z()};
  const DiscretizedDrive d = discretize(DriveProtocol::constant(h, 1.0), 4);
  Vector e = Vector::Zero(2);
  e(1) = 1.0;
  const CharacteristicSamples g =
      characteristic_function(DensityOperator::pure(e), d, CountingGrid::symmetric(3.0, 31));
  for (const auto& v : g.values) EXPECT_LE(std::abs(v - 1.0), 1e-14);
}

TEST(Characteristic, DimensionMismatch) {
  const DiscretizedDrive d = discretize(DriveProtocol::constant(HermitianOperator{pauli::z()}, 1.0), 4);
  EXPECT_THROW(characteristic_function(DensityOperator::maximally_mixed(3), d, CountingGrid::symmetric(1.0, 3)),
               ValidationError);
}

TEST(Characteristic, GroundStateMatchesTmpOracle) {
  std::mt19937_64 rng(3);
  const DiscretizedDrive d = discretize(random_drive(rng, 3), 64);
  Eigen::SelfAdjointEigenSolver<Matrix> e0(d.initial_hamiltonian().matrix());
  const Matrix rho = e0.eigenvectors().col(0) * e0.eigenvectors().col(0).adjoint();
  const CountingGrid grid = CountingGrid::symmetric(4.0, 41);
  const CharacteristicSamples g = characteristic_function(DensityOperator{rho}, d, grid);
  const auto outcomes = oracle::tmp_enumeration(rho, evolution_operator(d).matrix(), d.initial_hamiltonian().matrix(),
                                                d.final_hamiltonian().matrix());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LE(std::abs(g.values[i] - oracle::outcome_characteristic(outcomes, grid.values()[i])), 1e-10);
  }
  EXPECT_LE(g.normalization_error(), 1e-12);
  EXPECT_LE(g.hermiticity_error(), 1e-10);
}

TEST(Characteristic, CyclicFirstMomentVanishes) {
  const CyclicExampleParams p{std::numbers::pi / 3, std::numbers::pi / 5, 1.0, 1.0};
  const DiscretizedDrive d = cyclic_drive(p);
  const DensityOperator rho = DensityOperator::pure(floquet_state(p));
  const auto terms = spectral_decomposition(rho, d);
  EXPECT_LE(std::abs(moment(terms, 1).value), 1e-10);
  const double h = default_fd_step(terms, 1);
  EXPECT_LE(std::abs(moment_fd(characteristic_function(rho, d, fd_grid(h, 1)), 1, h)), 1e-10);
}

TEST(Spectral, DiagonalStateKeepsDiagonalTerms) {
  std::mt19937_64 rng(4);
  const DiscretizedDrive d = discretize(random_drive(rng, 3), 32);
  Eigen::SelfAdjointEigenSolver<Matrix> e0(d.initial_hamiltonian().matrix());
  Eigen::SelfAdjointEigenSolver<Matrix> et(d.final_hamiltonian().matrix());
  const Matrix& v = e0.eigenvectors();
  const Matrix rho = v * Eigen::Vector3cd(0.5, 0.3, 0.2).asDiagonal() * v.adjoint();
  for (const auto& t : spectral_decomposition(DensityOperator{rho}, d)) {
    EXPECT_EQ(t.i, t.j);
    EXPECT_NEAR(t.support, et.eigenvalues()(t.k) - e0.eigenvalues()(t.i), 1e-12);
    EXPECT_GE(t.weight.real(), 0.0);
  }
}

TEST(Spectral, PlusStateUnderIdentity) {
  const HermitianOperator h{pauli::z()};
  const DiscretizedDrive d = single_step_drive(UnitaryOperator::identity(2), h, 1.0);
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const DensityOperator rho = DensityOperator::pure(plus);
  const auto terms = spectral_decomposition(rho, d, 0.0);
  bool off_diagonal = false;
  for (const auto& t : terms) {
    if (t.i != t.j) {
      off_diagonal = true;
      EXPECT_NEAR(std::abs(t.support), 1.0, 1e-12);
      EXPECT_LE(std::abs(t.weight), 1e-15);  // zero for U = 1
    }
  }
  EXPECT_TRUE(off_diagonal);
  const CountingGrid grid = CountingGrid::symmetric(3.0, 31);
  const CharacteristicSamples g = characteristic_function(rho, d, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LE(std::abs(reconstruct(terms, grid.values()[i]) - g.values[i]), 1e-12);
  }
}

TEST(Spectral, ReconstructionRandom) {
  std::mt19937_64 rng(5);
  for (int dim = 2; dim <= 5; ++dim) {
    const DiscretizedDrive d = discretize(random_drive(rng, dim), 40);
    const DensityOperator rho{oracle::random_density(rng, dim)};
    const auto terms = spectral_decomposition(rho, d);
    const CountingGrid grid = CountingGrid::symmetric(5.0, 51);
    const CharacteristicSamples g = characteristic_function(rho, d, grid);
    Complex total{};
    for (const auto& t : terms) total += t.weight;
    EXPECT_LE(std::abs(total - 1.0), 1e-10);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_LE(std::abs(reconstruct(terms, grid.values()[i]) - g.values[i]), 1e-10);
    }
  }
}

TEST(Moments, IdentityDriveVanishes) {
  std::mt19937_64 rng(6);
  const HermitianOperator h{oracle::random_hermitian(rng, 3)};
  const DiscretizedDrive d = single_step_drive(UnitaryOperator::identity(3), h, 1.0);
  const auto terms = spectral_decomposition(DensityOperator{oracle::random_density(rng, 3)}, d);
  for (int n = 1; n <= 4; ++n) EXPECT_LE(std::abs(moment(terms, n).value), 1e-12);
  EXPECT_THROW(moment(terms, 0), ValidationError);
}

TEST(Moments, EigenstateMatchesTmpMoments) {
  std::mt19937_64 rng(7);
  const DiscretizedDrive d = discretize(random_drive(rng, 4), 50);
  Eigen::SelfAdjointEigenSolver<Matrix> e0(d.initial_hamiltonian().matrix());
  const Matrix rho = e0.eigenvectors().col(2) * e0.eigenvectors().col(2).adjoint();
  const auto terms = spectral_decomposition(DensityOperator{rho}, d);
  const auto outcomes = oracle::tmp_enumeration(rho, evolution_operator(d).matrix(), d.initial_hamiltonian().matrix(),
                                                d.final_hamiltonian().matrix());
  for (int n = 1; n <= 4; ++n) {
    EXPECT_NEAR(moment(terms, n).value, oracle::outcome_moment(outcomes, n), 1e-10);
  }
}

TEST(Moments, FirstMomentIsEnergyChange) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const int dim = 2 + trial % 4;
    const DiscretizedDrive d = discretize(random_drive(rng, dim), 30);
    const Matrix rho = oracle::random_density(rng, dim);
    const Matrix u = evolution_operator(d).matrix();
    const double expect = (d.final_hamiltonian().matrix() * u * rho * u.adjoint()).trace().real() -
                          (d.initial_hamiltonian().matrix() * rho).trace().real();
    const auto terms = spectral_decomposition(DensityOperator{rho}, d);
    EXPECT_NEAR(moment(terms, 1).value, expect, 1e-10);
    EXPECT_NEAR(mean_energy_change(DensityOperator{rho}, d), expect, 1e-12);
    EXPECT_LE(moment(terms, 1).imag_residual, 1e-10);
  }
}

TEST(FiniteDifference, SyntheticPhase) {
  const double omega = 1.7;
  for (double h : {1e-2, 5e-3}) {
    for (bool richardson : {false, true}) {
      const CountingGrid grid = fd_grid(h, 2, richardson);
      CharacteristicSamples s{grid, {}};
      for (double l : grid.values()) s.values.push_back(std::exp(kI * omega * l));
      const double tol1 = richardson ? 10.0 * std::pow(h, 4) * std::pow(omega, 5) : 2.0 * h * h * std::pow(omega, 3);
      const double tol2 = richardson ? 10.0 * std::pow(h, 4) * std::pow(omega, 6) : 2.0 * h * h * std::pow(omega, 4);
      EXPECT_NEAR(moment_fd(s, 1, h, richardson), omega, tol1);
      EXPECT_NEAR(moment_fd(s, 2, h, richardson), omega * omega, tol2);
    }
  }
}

TEST(FiniteDifference, MissingStencilPoint) {
  const CountingGrid grid = CountingGrid::symmetric(1.0, 3);
  CharacteristicSamples s{grid, {1.0, 1.0, 1.0}};
  EXPECT_THROW(moment_fd(s, 1, 0.1), ValidationError);
  EXPECT_THROW(moment_fd(s, 0, 1.0), ValidationError);
}

TEST(FiniteDifference, CyclicAndRandomAgree) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 6; ++trial) {
    const int dim = 2 + trial % 3;
    const DiscretizedDrive d = discretize(random_drive(rng, dim), 40);
    const DensityOperator rho{oracle::random_density(rng, dim)};
    const auto terms = spectral_decomposition(rho, d);
    for (int n = 1; n <= 4; ++n) {
      const double h = default_fd_step(terms, n);
      const double fd = moment_fd(characteristic_function(rho, d, fd_grid(h, n)), n, h);
      EXPECT_LE(std::abs(fd - moment(terms, n).value), 1e-6 * absolute_moment(terms, n)) << "n = " << n;
    }
  }
}

TEST(Distribution, DiagonalEqualsTmp) {
  std::mt19937_64 rng(10);
  const DiscretizedDrive d = discretize(random_drive(rng, 3), 32);
  Eigen::SelfAdjointEigenSolver<Matrix> e0(d.initial_hamiltonian().matrix());
  const Matrix& v = e0.eigenvectors();
  const Matrix rho = v * Eigen::Vector3cd(0.2, 0.5, 0.3).asDiagonal() * v.adjoint();
  const auto terms = spectral_decomposition(DensityOperator{rho}, d);
  const QuasiDistribution q = quasi_distribution(terms, default_bin_tolerance(terms));
  const auto outcomes = oracle::tmp_enumeration(rho, evolution_operator(d).matrix(), d.initial_hamiltonian().matrix(),
                                                d.final_hamiltonian().matrix());
  ASSERT_EQ(q.support.size(), outcomes.size());
  for (std::size_t m = 0; m < q.support.size(); ++m) {
    bool found = false;
    for (const auto& o : outcomes) {
      if (std::abs(o.work - q.support[m]) < 1e-9) {
        EXPECT_NEAR(o.probability, q.weights[m], 1e-10);
        found = true;
      }
    }
    EXPECT_TRUE(found);
    EXPECT_GE(q.weights[m], 0.0);
  }
  EXPECT_NEAR(q.total_weight(), 1.0, 1e-10);
}

TEST(Distribution, CyclicNegativity) {
  const CyclicExampleParams p{std::numbers::pi / 3, std::numbers::pi / 4, 1.0, 1.0};
  const auto terms = spectral_decomposition(DensityOperator::pure(floquet_state(p)), cyclic_drive(p));
  const QuasiDistribution q = quasi_distribution(terms, default_bin_tolerance(terms));
  EXPECT_LT(q.min_weight(), -1e-3);
  EXPECT_NEAR(q.total_weight(), 1.0, 1e-10);
  EXPECT_LE(q.imag_residual, 1e-10);
}

TEST(Distribution, EnergyConservingEigenstate) {
  const HermitianOperator h{pauli::z()};
  const DiscretizedDrive d = discretize(DriveProtocol::constant(h, 2.0), 8);
  Vector e = Vector::Zero(2);
  e(0) = 1.0;
  const auto terms = spectral_decomposition(DensityOperator::pure(e), d);
  const QuasiDistribution q = quasi_distribution(terms, default_bin_tolerance(terms));
  ASSERT_EQ(q.support.size(), 1u);
  EXPECT_NEAR(q.support[0], 0.0, 1e-12);
  EXPECT_NEAR(q.weights[0], 1.0, 1e-12);
  EXPECT_THROW(quasi_distribution(terms, 0.0), ValidationError);
}

TEST(Distribution, GaugeShiftLeavesSupport) {
  std::mt19937_64 rng(11);
  const DiscretizedDrive d = discretize(random_drive(rng, 3), 32);
  const DensityOperator rho{oracle::random_density(rng, 3)};
  const auto a = spectral_decomposition(rho, d);
  const auto b = spectral_decomposition(rho, d.shifted(2.5));
  const QuasiDistribution qa = quasi_distribution(a, default_bin_tolerance(a));
  const QuasiDistribution qb = quasi_distribution(b, default_bin_tolerance(a));
  const DistributionComparison c = compare_distributions(qa, qb, 1e-9);
  EXPECT_LE(c.max_support_gap, 1e-10);
  EXPECT_LE(c.max_weight_gap, 1e-10);
  EXPECT_LE(c.unmatched_weight, 1e-10);
  for (int n = 1; n <= 3; ++n) EXPECT_NEAR(moment(a, n).value, moment(b, n).value, 1e-9);
}

TEST(Distribution, WindowedFourierMatchesSmearing) {
  const CyclicExampleParams p{std::numbers::pi / 3, std::numbers::pi / 4, 1.0, 1.0};
  const DiscretizedDrive d = cyclic_drive(p);
  const DensityOperator rho = DensityOperator::pure(floquet_state(p));
  const auto terms = spectral_decomposition(rho, d);
  const QuasiDistribution q = quasi_distribution(terms, default_bin_tolerance(terms));
  const CharacteristicSamples g = characteristic_function(rho, d, CountingGrid::symmetric(30.0, 601));
  std::vector<double> energies;
  for (int i = -40; i <= 40; ++i) energies.push_back(0.05 * i);
  const double s = 6.0;
  const auto numeric = windowed_density(g, energies, s);
  const auto analytic = smeared_distribution(q, energies, s);
  double peak = 0.0;
  for (double v : analytic) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < energies.size(); ++i) EXPECT_NEAR(numeric[i], analytic[i], 1e-3 * peak);
}

TEST(Split, DiagonalHasNoCoherentPart) {
  std::mt19937_64 rng(12);
  const DiscretizedDrive d = discretize(random_drive(rng, 2), 32);
  Eigen::SelfAdjointEigenSolver<Matrix> e0(d.initial_hamiltonian().matrix());
  const Matrix& v = e0.eigenvectors();
  const Matrix rho = v * Eigen::Vector2cd(0.7, 0.3).asDiagonal() * v.adjoint();
  const CoherentClassicalSplit s = coherent_classical_split(spectral_decomposition(DensityOperator{rho}, d));
  EXPECT_NEAR(s.coherent, 0.0, 1e-12);
}

TEST(Split, CyclicClassicalMatchesTmpOracle) {
  for (double xi : {std::numbers::pi / 5, 0.9}) {
    const CyclicExampleParams p{std::numbers::pi / 3, xi, 1.3, 1.0};
    const Matrix rho = floquet_state(p) * floquet_state(p).adjoint();
    const auto outcomes = oracle::tmp_enumeration(rho, cyclic_unitary_matrix(p), cyclic_hamiltonian(p).matrix(),
                                                  cyclic_hamiltonian(p).matrix());
    const CoherentClassicalSplit s =
        coherent_classical_split(spectral_decomposition(DensityOperator{rho}, cyclic_drive(p)));
    EXPECT_NEAR(s.classical, oracle::outcome_moment(outcomes, 1), 1e-12);
    EXPECT_NEAR(s.coherent, -s.classical, 1e-10);
    EXPECT_GT(std::abs(s.classical), 1e-3);
  }
}

TEST(Split, EqualSuperpositionBothZero) {
  const CyclicExampleParams p{std::numbers::pi / 4, 0.7, 1.0, 1.0};
  const CoherentClassicalSplit s =
      coherent_classical_split(spectral_decomposition(DensityOperator::pure(floquet_state(p)), cyclic_drive(p)));
  EXPECT_NEAR(s.classical, 0.0, 1e-12);
  EXPECT_NEAR(s.coherent, 0.0, 1e-10);
}
