#include "qfcs/tmp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qfcs/error.hpp"

namespace qfcs {

std::vector<EnergyLevel> energy_levels(const HermitianOperator& h, double level_tol) {
  const EigenSystem eig = eig_hermitian(h);
  const Matrix& v = eig.vectors.matrix();
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  std::vector<EnergyLevel> levels;
  Eigen::Index begin = 0;
  const Eigen::Index n = eig.values.size();
  while (begin < n) {
    Eigen::Index end = begin + 1;
    while (end < n && eig.values(end) - eig.values(begin) <= level_tol * scale) ++end;
    const Matrix cols = v.middleCols(begin, end - begin);
    levels.push_back({eig.values.segment(begin, end - begin).mean(), cols * cols.adjoint()});
    begin = end;
  }
  return levels;
}

std::vector<TmpOutcome> tmp_distribution(const DensityOperator& rho, const DiscretizedDrive& d,
                                         const TmpOptions& options) {
  if (rho.dim() != d.dim()) {
    std::ostringstream os;
    os << "tmp_distribution: state dimension " << rho.dim() << " vs drive dimension " << d.dim();
    throw ValidationError(os.str());
  }
  const auto initial = energy_levels(d.initial_hamiltonian(), options.level_tol);
  const auto final = energy_levels(d.final_hamiltonian(), options.level_tol);
  const Matrix u = evolution_operator(d).matrix();
  std::vector<TmpOutcome> out;
  for (std::size_t i = 0; i < initial.size(); ++i) {
    const Matrix& p = initial[i].projector;
    const Matrix collapsed = u * p * rho.matrix() * p * u.adjoint();
    for (std::size_t k = 0; k < final.size(); ++k) {
      const double prob = (final[k].projector * collapsed).trace().real();
      if (prob < options.prune) continue;
      out.push_back({static_cast<int>(i), static_cast<int>(k), initial[i].energy, final[k].energy,
                     prob, final[k].energy - initial[i].energy});
    }
  }
  return out;
}

double tmp_average(std::span<const TmpOutcome> outcomes) {
  return tmp_moment(outcomes, 1);
}

double tmp_moment(std::span<const TmpOutcome> outcomes, int n) {
  if (n < 1) throw ValidationError("tmp_moment: order must be >= 1");
  double s = 0.0;
  for (const auto& o : outcomes) s += o.probability * std::pow(o.work, n);
  return s;
}

CharacteristicSamples tmp_characteristic(std::span<const TmpOutcome> outcomes, const CountingGrid& grid) {
  CharacteristicSamples out{grid, {}};
  out.values.reserve(grid.size());
  for (double lambda : grid.values()) {
    Complex g{};
    for (const auto& o : outcomes) g += o.probability * std::exp(kI * lambda * o.work);
    out.values.push_back(g);
  }
  return out;
}

QuasiDistribution tmp_work_distribution(std::span<const TmpOutcome> outcomes, double bin_tol) {
  if (!(bin_tol > 0.0)) throw ValidationError("tmp_work_distribution: bin_tol must be positive");
  std::vector<TmpOutcome> sorted(outcomes.begin(), outcomes.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.work != b.work) return a.work < b.work;
    if (a.i != b.i) return a.i < b.i;
    return a.k < b.k;
  });
  QuasiDistribution out;
  std::size_t begin = 0;
  while (begin < sorted.size()) {
    std::size_t end = begin;
    double w = 0.0;
    double s = 0.0;
    while (end < sorted.size() && sorted[end].work - sorted[begin].work <= bin_tol) {
      w += sorted[end].probability;
      s += sorted[end].work;
      ++end;
    }
    out.support.push_back(s / static_cast<double>(end - begin));
    out.weights.push_back(w);
    begin = end;
  }
  return out;
}

DensityOperator dephase(const DensityOperator& rho, const HermitianOperator& h, double level_tol) {
  if (rho.dim() != h.dim()) throw ValidationError("dephase: dimension mismatch");
  Matrix out = Matrix::Zero(rho.matrix().rows(), rho.matrix().cols());
  for (const auto& level : energy_levels(h, level_tol)) {
    out += level.projector * rho.matrix() * level.projector;
  }
  return DensityOperator(out);
}

}  // namespace qfcs
