#pragma once

// Closed-system work statistics from detector phases: the characteristic
// function G(lambda), its exact spectral expansion, moments and the binned
// quasi-probability distribution of the internal-energy change.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qfcs/drive.hpp"
#include "qfcs/linalg.hpp"

namespace qfcs {

/// Symmetric set of counting-field values containing 0, stored ascending.
class CountingGrid {
 public:
  /// Throws ValidationError unless the values contain 0 and are symmetric
  /// about it (to 1e-12 relative).
  explicit CountingGrid(std::vector<double> lambdas);

  /// `points` equally spaced values on [-max, max]; points must be odd.
  static CountingGrid symmetric(double max, int points);
  /// {j h : |j| <= half_width}.
  static CountingGrid uniform(double h, int half_width);

  const std::vector<double>& values() const { return lambdas_; }
  std::size_t size() const { return lambdas_.size(); }
  /// Smallest gap between neighbouring values (0 for a single-point grid).
  double spacing() const;
  std::optional<std::size_t> find(double lambda, double tol) const;

 private:
  std::vector<double> lambdas_;
};

struct CharacteristicSamples {
  CountingGrid grid;
  std::vector<Complex> values;

  Complex at(double lambda, double tol = 1e-12) const;
  /// |G(0) - 1|.
  double normalization_error() const;
  /// max |G(-lambda) - conj(G(lambda))| over the grid.
  double hermiticity_error() const;
};

/// Support points and real (possibly negative) weights.
struct QuasiDistribution {
  std::vector<double> support;
  std::vector<double> weights;
  /// Largest |Im| of a merged weight before it was dropped.
  double imag_residual = 0.0;

  double total_weight() const;
  double min_weight() const;
};

/// One term rho_ij U_ki conj(U_kj) exp(i lambda (e_k^T - (e_i^0 + e_j^0)/2)).
/// Indices refer to the ascending eigenbases of H_S(0) (i, j) and H_S(T) (k).
struct SpectralWorkTerm {
  int i = 0;
  int j = 0;
  int k = 0;
  double support = 0.0;
  Complex weight{};
};

/// exp(i lambda H_S(T)/2) U(T) exp(-i lambda H_S(0)/2). The argument is the
/// physical counting field; the halving is applied here.
UnitaryOperator two_kick_propagator(const DiscretizedDrive& d, double lambda);

/// G(lambda) = Tr[U_{lambda/2} rho U_{-lambda/2}^dag] at each grid point.
CharacteristicSamples characteristic_function(const DensityOperator& rho, const DiscretizedDrive& d,
                                              const CountingGrid& grid);

/// Exact expansion of G in the initial and final eigenbases. Terms whose
/// |weight| falls below `prune` are dropped.
std::vector<SpectralWorkTerm> spectral_decomposition(const DensityOperator& rho,
                                                     const DiscretizedDrive& d,
                                                     double prune = 1e-14);

/// Sum of weight * exp(i lambda support).
Complex reconstruct(std::span<const SpectralWorkTerm> terms, double lambda);

struct MomentEstimate {
  double value = 0.0;
  /// |Im| of the complex sum; round-off only for a valid decomposition.
  double imag_residual = 0.0;
};

/// n-th moment Re[sum weight * support^n]; throws ValidationError for n < 1.
MomentEstimate moment(std::span<const SpectralWorkTerm> terms, int n);

/// sum |weight| |support|^n, the natural scale of the n-th moment.
double absolute_moment(std::span<const SpectralWorkTerm> terms, int n);

/// Largest |support|, or 1 when all supports vanish.
double support_radius(std::span<const SpectralWorkTerm> terms);

/// 1e-3 / support radius for orders up to 2, 5e-2 / support radius above,
/// where round-off in the n-th difference would otherwise dominate.
double default_fd_step(std::span<const SpectralWorkTerm> terms, int order = 1);

/// Grid holding every stencil point moment_fd needs for order n and step h.
CountingGrid fd_grid(double h, int n, bool richardson = true);

/// Central-difference estimate of (-i)^n d^n G / d lambda^n at 0 using the
/// samples at {0, +-h, +-2h, ...}; one Richardson step combines h and 2h.
/// Throws ValidationError when a stencil point is missing.
double moment_fd(const CharacteristicSamples& samples, int n, double h, bool richardson = true);

/// Round-off level of moment_fd: machine epsilon times the summed absolute
/// stencil weights over h^n.
double fd_roundoff_floor(int n, double h, bool richardson = true);

/// Merges supports closer than bin_tol (measured from the first member of a
/// bin) and keeps the real part of each merged weight. Throws NumericalError
/// when a merged imaginary part exceeds imag_tol.
QuasiDistribution quasi_distribution(std::span<const SpectralWorkTerm> terms, double bin_tol,
                                     double imag_tol = 1e-10);

/// Default bin tolerance: 1e-9 times the support radius.
double default_bin_tolerance(std::span<const SpectralWorkTerm> terms);

struct CoherentClassicalSplit {
  double classical = 0.0;  // i == j terms: the two-measurement average
  double coherent = 0.0;   // first moment minus the classical part
};

CoherentClassicalSplit coherent_classical_split(std::span<const SpectralWorkTerm> terms);

/// Tr[H_S(T) U rho U^dag] - Tr[H_S(0) rho].
double mean_energy_change(const DensityOperator& rho, const DiscretizedDrive& d);

/// Grid Fourier transform of G with a Gaussian window exp(-lambda^2/(2 s^2)):
/// density(u) = (1/2pi) sum_lambda w_lambda G(lambda) window e^{-i lambda u}
/// with trapezoid weights. A validation path: the window smears each support
/// point into a Gaussian of width 1/s.
std::vector<double> windowed_density(const CharacteristicSamples& samples,
                                     std::span<const double> energies, double window_width);

/// The same smoothing applied analytically to a binned distribution.
std::vector<double> smeared_distribution(const QuasiDistribution& dist,
                                         std::span<const double> energies, double window_width);

struct DistributionComparison {
  double max_support_gap = 0.0;   // over matched support points
  double max_weight_gap = 0.0;    // over matched support points
  double unmatched_weight = 0.0;  // largest |weight| without a partner
};

/// Pairs support points within support_tol (nearest first) and reports the
/// worst disagreements.
DistributionComparison compare_distributions(const QuasiDistribution& a, const QuasiDistribution& b,
                                             double support_tol);

}  // namespace qfcs
