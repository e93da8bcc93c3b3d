#include "qfcs/fcs_closed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qfcs/error.hpp"

namespace qfcs {

// ---------------------------------------------------------------------------
// CountingGrid

CountingGrid::CountingGrid(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
  if (lambdas_.empty()) throw ValidationError("CountingGrid: empty");
  std::sort(lambdas_.begin(), lambdas_.end());
  double scale = 0.0;
  for (double l : lambdas_) {
    if (!std::isfinite(l)) throw ValidationError("CountingGrid: non-finite value");
    scale = std::max(scale, std::abs(l));
  }
  const double tol = 1e-12 * std::max(scale, 1.0);
  if (!find(0.0, tol)) throw ValidationError("CountingGrid: must contain lambda = 0");
  const std::size_t n = lambdas_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(lambdas_[i] + lambdas_[n - 1 - i]) > tol) {
      std::ostringstream os;
      os << "CountingGrid: not symmetric, " << lambdas_[i] << " has no partner";
      throw ValidationError(os.str());
    }
  }
  // Pin exact symmetry so that -lambda lookups are exact.
  for (std::size_t i = 0; i < n / 2; ++i) lambdas_[n - 1 - i] = -lambdas_[i];
  if (n % 2 == 1) lambdas_[n / 2] = 0.0;
}

CountingGrid CountingGrid::symmetric(double max, int points) {
  if (points < 1 || points % 2 == 0) throw ValidationError("CountingGrid: points must be odd and >= 1");
  if (!(max > 0.0) && points > 1) throw ValidationError("CountingGrid: max must be positive");
  const int half = (points - 1) / 2;
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(points));
  for (int j = -half; j <= half; ++j) v.push_back(half == 0 ? 0.0 : max * j / half);
  return CountingGrid(std::move(v));
}

CountingGrid CountingGrid::uniform(double h, int half_width) {
  if (!(h > 0.0) || half_width < 0) throw ValidationError("CountingGrid::uniform: bad step");
  std::vector<double> v;
  for (int j = -half_width; j <= half_width; ++j) v.push_back(j * h);
  return CountingGrid(std::move(v));
}

double CountingGrid::spacing() const {
  double gap = 0.0;
  for (std::size_t i = 1; i < lambdas_.size(); ++i) {
    const double d = lambdas_[i] - lambdas_[i - 1];
    gap = (i == 1) ? d : std::min(gap, d);
  }
  return gap;
}

std::optional<std::size_t> CountingGrid::find(double lambda, double tol) const {
  auto it = std::lower_bound(lambdas_.begin(), lambdas_.end(), lambda - tol);
  if (it != lambdas_.end() && std::abs(*it - lambda) <= tol) {
    return static_cast<std::size_t>(it - lambdas_.begin());
  }
  return std::nullopt;
}

Complex CharacteristicSamples::at(double lambda, double tol) const {
  const auto idx = grid.find(lambda, tol * std::max(1.0, std::abs(lambda)));
  if (!idx) {
    std::ostringstream os;
    os << "CharacteristicSamples: lambda = " << lambda << " not on the grid";
    throw ValidationError(os.str());
  }
  return values[*idx];
}

double CharacteristicSamples::normalization_error() const {
  return std::abs(at(0.0) - 1.0);
}

double CharacteristicSamples::hermiticity_error() const {
  const std::size_t n = values.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(values[n - 1 - i] - std::conj(values[i])));
  }
  return worst;
}

double QuasiDistribution::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double QuasiDistribution::min_weight() const {
  return weights.empty() ? 0.0 : *std::min_element(weights.begin(), weights.end());
}

// ---------------------------------------------------------------------------
// Propagators and G

namespace {

struct KickedDrive {
  EigenSystem initial;
  EigenSystem final;
  Matrix u;

  explicit KickedDrive(const DiscretizedDrive& d)
      : initial(eig_hermitian(d.initial_hamiltonian())),
        final(eig_hermitian(d.final_hamiltonian())),
        u(evolution_operator(d).matrix()) {}

  // exp(i s H_S(T)) U exp(-i s H_S(0))
  Matrix kicked(double s) const {
    return expm_unitary(final, -s).matrix() * u * expm_unitary(initial, s).matrix();
  }
};

}  // namespace

UnitaryOperator two_kick_propagator(const DiscretizedDrive& d, double lambda) {
  return UnitaryOperator(KickedDrive(d).kicked(0.5 * lambda));
}

CharacteristicSamples characteristic_function(const DensityOperator& rho, const DiscretizedDrive& d,
                                              const CountingGrid& grid) {
  if (rho.dim() != d.dim()) {
    std::ostringstream os;
    os << "characteristic_function: state dimension " << rho.dim() << " vs drive dimension " << d.dim();
    throw ValidationError(os.str());
  }
  const KickedDrive kd(d);
  CharacteristicSamples out{grid, {}};
  out.values.reserve(grid.size());
  for (double lambda : grid.values()) {
    const Matrix plus = kd.kicked(0.5 * lambda);
    const Matrix minus = kd.kicked(-0.5 * lambda);
    out.values.push_back((plus * rho.matrix() * minus.adjoint()).trace());
  }
  return out;
}

std::vector<SpectralWorkTerm> spectral_decomposition(const DensityOperator& rho,
                                                     const DiscretizedDrive& d, double prune) {
  if (rho.dim() != d.dim()) throw ValidationError("spectral_decomposition: dimension mismatch");
  const KickedDrive kd(d);
  const Matrix& v0 = kd.initial.vectors.matrix();
  const Matrix& vt = kd.final.vectors.matrix();
  const Matrix r = v0.adjoint() * rho.matrix() * v0;
  const Matrix u = vt.adjoint() * kd.u * v0;
  const auto n = static_cast<int>(d.dim());
  std::vector<SpectralWorkTerm> terms;
  terms.reserve(static_cast<std::size_t>(n * n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const Complex w = r(i, j) * u(k, i) * std::conj(u(k, j));
        if (std::abs(w) < prune) continue;
        const double s = kd.final.values(k) - 0.5 * (kd.initial.values(i) + kd.initial.values(j));
        terms.push_back({i, j, k, s, w});
      }
    }
  }
  return terms;
}

Complex reconstruct(std::span<const SpectralWorkTerm> terms, double lambda) {
  Complex g{};
  for (const auto& t : terms) g += t.weight * std::exp(kI * lambda * t.support);
  return g;
}

// ---------------------------------------------------------------------------
// Moments

MomentEstimate moment(std::span<const SpectralWorkTerm> terms, int n) {
  if (n < 1) throw ValidationError("moment: order must be >= 1");
  Complex sum{};
  for (const auto& t : terms) sum += t.weight * std::pow(t.support, n);
  return {sum.real(), std::abs(sum.imag())};
}

double absolute_moment(std::span<const SpectralWorkTerm> terms, int n) {
  double sum = 0.0;
  for (const auto& t : terms) sum += std::abs(t.weight) * std::pow(std::abs(t.support), n);
  return sum;
}

double support_radius(std::span<const SpectralWorkTerm> terms) {
  double r = 0.0;
  for (const auto& t : terms) r = std::max(r, std::abs(t.support));
  return r > 0.0 ? r : 1.0;
}

double default_fd_step(std::span<const SpectralWorkTerm> terms, int order) {
  return (order <= 2 ? 1e-3 : 5e-2) / support_radius(terms);
}

namespace {

// Orders above 2 get one extra node on each side so that a wider step keeps
// round-off in check.
int stencil_half_width(int n) { return (n + 1) / 2 + (n > 2 ? 1 : 0); }

// Fornberg's recursion: weights of the m-th derivative at 0 on the integer
// nodes -p..p.
std::vector<double> central_weights(int m, int p) {
  const int npts = 2 * p + 1;
  std::vector<double> x(static_cast<std::size_t>(npts));
  for (int i = 0; i < npts; ++i) x[static_cast<std::size_t>(i)] = i - p;
  std::vector<std::vector<double>> c(static_cast<std::size_t>(npts),
                                     std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
  double c1 = 1.0;
  double c4 = x[0];
  c[0][0] = 1.0;
  for (int i = 1; i < npts; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[static_cast<std::size_t>(i)];
    for (int j = 0; j < i; ++j) {
      const double c3 = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
      c2 *= c3;
      auto& ci = c[static_cast<std::size_t>(i)];
      const auto& cprev = c[static_cast<std::size_t>(i - 1)];
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          ci[static_cast<std::size_t>(k)] =
              c1 * (k * cprev[static_cast<std::size_t>(k - 1)] - c5 * cprev[static_cast<std::size_t>(k)]) / c2;
        }
        ci[0] = -c1 * c5 * cprev[0] / c2;
      }
      auto& cj = c[static_cast<std::size_t>(j)];
      for (int k = mn; k >= 1; --k) {
        cj[static_cast<std::size_t>(k)] =
            (c4 * cj[static_cast<std::size_t>(k)] - k * cj[static_cast<std::size_t>(k - 1)]) / c3;
      }
      cj[0] = c4 * cj[0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(npts));
  for (int i = 0; i < npts; ++i) w[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
  return w;
}

Complex central_derivative(const CharacteristicSamples& s, int n, double h) {
  const int p = stencil_half_width(n);
  const std::vector<double> w = central_weights(n, p);
  Complex sum{};
  for (int j = -p; j <= p; ++j) {
    const double lambda = j * h;
    const auto idx = s.grid.find(lambda, 1e-9 * h);
    if (!idx) {
      std::ostringstream os;
      os << "moment_fd: stencil point lambda = " << lambda << " missing from the grid";
      throw ValidationError(os.str());
    }
    sum += w[static_cast<std::size_t>(j + p)] * s.values[*idx];
  }
  return sum / std::pow(h, n);
}

}  // namespace

CountingGrid fd_grid(double h, int n, bool richardson) {
  if (n < 1) throw ValidationError("fd_grid: order must be >= 1");
  const int p = stencil_half_width(n);
  return CountingGrid::uniform(h, richardson ? 2 * p : p);
}

double moment_fd(const CharacteristicSamples& samples, int n, double h, bool richardson) {
  if (n < 1) throw ValidationError("moment_fd: order must be >= 1");
  if (!(h > 0.0)) throw ValidationError("moment_fd: step must be positive");
  Complex d = central_derivative(samples, n, h);
  if (richardson) {
    // Leading error of the central stencil is O(h^q) with q even.
    const int q = 2 * stencil_half_width(n) + 1 - n + ((2 * stencil_half_width(n) + 1 - n) % 2);
    const double f = std::pow(2.0, q);
    d = (f * d - central_derivative(samples, n, 2.0 * h)) / (f - 1.0);
  }
  return (std::pow(-kI, n) * d).real();
}

double fd_roundoff_floor(int n, double h, bool richardson) {
  if (n < 1) throw ValidationError("fd_roundoff_floor: order must be >= 1");
  const int p = stencil_half_width(n);
  double sum = 0.0;
  for (double w : central_weights(n, p)) sum += std::abs(w);
  double scale = sum / std::pow(h, n);
  if (richardson) {
    const int q = 2 * p + 1 - n + ((2 * p + 1 - n) % 2);
    const double f = std::pow(2.0, q);
    scale = (f * scale + scale / std::pow(2.0, n)) / (f - 1.0);
  }
  return std::numeric_limits<double>::epsilon() * scale;
}

// ---------------------------------------------------------------------------
// Distribution

QuasiDistribution quasi_distribution(std::span<const SpectralWorkTerm> terms, double bin_tol,
                                     double imag_tol) {
  if (!(bin_tol > 0.0)) throw ValidationError("quasi_distribution: bin_tol must be positive");
  std::vector<SpectralWorkTerm> sorted(terms.begin(), terms.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.support != b.support) return a.support < b.support;
    if (a.i != b.i) return a.i < b.i;
    if (a.j != b.j) return a.j < b.j;
    return a.k < b.k;
  });
  QuasiDistribution out;
  std::size_t begin = 0;
  while (begin < sorted.size()) {
    std::size_t end = begin;
    Complex w{};
    double support_sum = 0.0;
    while (end < sorted.size() && sorted[end].support - sorted[begin].support <= bin_tol) {
      w += sorted[end].weight;
      support_sum += sorted[end].support;
      ++end;
    }
    out.support.push_back(support_sum / static_cast<double>(end - begin));
    out.weights.push_back(w.real());
    out.imag_residual = std::max(out.imag_residual, std::abs(w.imag()));
    begin = end;
  }
  if (out.imag_residual > imag_tol) {
    std::ostringstream os;
    os << "quasi_distribution: merged weights keep an imaginary part " << out.imag_residual
       << " > " << imag_tol << "; check bin_tol";
    throw NumericalError(os.str());
  }
  return out;
}

double default_bin_tolerance(std::span<const SpectralWorkTerm> terms) {
  return 1e-9 * support_radius(terms);
}

CoherentClassicalSplit coherent_classical_split(std::span<const SpectralWorkTerm> terms) {
  CoherentClassicalSplit split;
  for (const auto& t : terms) {
    if (t.i == t.j) split.classical += t.weight.real() * t.support;
  }
  split.coherent = moment(terms, 1).value - split.classical;
  return split;
}

double mean_energy_change(const DensityOperator& rho, const DiscretizedDrive& d) {
  const Matrix u = evolution_operator(d).matrix();
  const Matrix rho_t = u * rho.matrix() * u.adjoint();
  return (d.final_hamiltonian().matrix() * rho_t).trace().real() -
         (d.initial_hamiltonian().matrix() * rho.matrix()).trace().real();
}

std::vector<double> windowed_density(const CharacteristicSamples& samples,
                                     std::span<const double> energies, double window_width) {
  if (!(window_width > 0.0)) throw ValidationError("windowed_density: window width must be positive");
  const auto& l = samples.grid.values();
  const std::size_t n = l.size();
  if (n < 3) throw ValidationError("windowed_density: need at least three grid points");
  std::vector<double> quad(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double half = 0.5 * (l[i + 1] - l[i]);
    quad[i] += half;
    quad[i + 1] += half;
  }
  std::vector<double> out;
  out.reserve(energies.size());
  for (double u : energies) {
    Complex acc{};
    for (std::size_t i = 0; i < n; ++i) {
      const double window = std::exp(-0.5 * l[i] * l[i] / (window_width * window_width));
      acc += quad[i] * window * samples.values[i] * std::exp(-kI * l[i] * u);
    }
    out.push_back(acc.real() / (2.0 * std::numbers::pi));
  }
  return out;
}

std::vector<double> smeared_distribution(const QuasiDistribution& dist,
                                         std::span<const double> energies, double window_width) {
  if (!(window_width > 0.0)) throw ValidationError("smeared_distribution: window width must be positive");
  const double norm = window_width / std::sqrt(2.0 * std::numbers::pi);
  std::vector<double> out;
  out.reserve(energies.size());
  for (double u : energies) {
    double acc = 0.0;
    for (std::size_t m = 0; m < dist.support.size(); ++m) {
      const double x = (u - dist.support[m]) * window_width;
      acc += dist.weights[m] * norm * std::exp(-0.5 * x * x);
    }
    out.push_back(acc);
  }
  return out;
}

DistributionComparison compare_distributions(const QuasiDistribution& a, const QuasiDistribution& b,
                                             double support_tol) {
  DistributionComparison cmp;
  std::vector<bool> used(b.support.size(), false);
  auto match = [&](double s) -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < b.support.size(); ++j) {
      if (used[j] || std::abs(b.support[j] - s) > support_tol) continue;
      if (!best || std::abs(b.support[j] - s) < std::abs(b.support[*best] - s)) best = j;
    }
    return best;
  };
  for (std::size_t i = 0; i < a.support.size(); ++i) {
    if (const auto j = match(a.support[i])) {
      used[*j] = true;
      cmp.max_support_gap = std::max(cmp.max_support_gap, std::abs(a.support[i] - b.support[*j]));
      cmp.max_weight_gap = std::max(cmp.max_weight_gap, std::abs(a.weights[i] - b.weights[*j]));
    } else {
      cmp.unmatched_weight = std::max(cmp.unmatched_weight, std::abs(a.weights[i]));
    }
  }
  for (std::size_t j = 0; j < b.support.size(); ++j) {
    if (!used[j]) cmp.unmatched_weight = std::max(cmp.unmatched_weight, std::abs(b.weights[j]));
  }
  return cmp;
}

}  // namespace qfcs
