#include "qfcs/paths.hpp"

#include <cmath>
#include <sstream>

#include "qfcs/error.hpp"

namespace qfcs {

namespace {

void check_functional(const DiscretizedDrive& d, const PathFunctional& f) {
  const std::size_t n = d.step_count() + 1;
  if (f.observables.size() != n || f.weights.size() != n) {
    std::ostringstream os;
    os << "path functional: need " << n << " observables and weights, got " << f.observables.size()
       << " and " << f.weights.size();
    throw ValidationError(os.str());
  }
  for (const auto& a : f.observables) {
    if (a.dim() != d.dim()) throw ValidationError("path functional: observable dimension mismatch");
  }
}

}  // namespace

std::vector<PathRecord> enumerate_paths(const DiscretizedDrive& d, const PathFunctional& f,
                                        const Vector& psi0, const Vector& psi_t) {
  check_functional(d, f);
  const auto dim = static_cast<int>(d.dim());
  if (psi0.size() != dim || psi_t.size() != dim) throw ValidationError("enumerate_paths: state dimension mismatch");
  const std::size_t slots = d.step_count() + 1;
  const double count = std::pow(static_cast<double>(dim), static_cast<double>(slots));
  if (count > kMaxPaths) {
    std::ostringstream os;
    os << "enumerate_paths: " << dim << "^" << slots << " = " << count << " paths exceeds the bound "
       << kMaxPaths;
    throw ValidationError(os.str());
  }

  std::vector<EigenSystem> bases;
  bases.reserve(slots);
  for (const auto& a : f.observables) bases.push_back(eig_hermitian(a));
  // transfer[k](b, a) = <a_b^{k+1}| E_k |a_a^k>
  std::vector<Matrix> transfer;
  for (std::size_t k = 0; k + 1 < slots; ++k) {
    const Matrix e = expm_unitary(d.steps()[k].hamiltonian, d.dt()).matrix();
    transfer.push_back(bases[k + 1].vectors.matrix().adjoint() * e * bases[k].vectors.matrix());
  }
  const Vector start = bases.front().vectors.matrix().adjoint() * psi0;
  const Vector end = bases.back().vectors.matrix().adjoint() * psi_t;

  std::vector<PathRecord> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<int> idx(slots, 0);
  while (true) {
    Complex amp = start(idx[0]);
    double functional = f.weights[0] * bases[0].values(idx[0]);
    for (std::size_t k = 1; k < slots; ++k) {
      amp *= transfer[k - 1](idx[k], idx[k - 1]);
      functional += f.weights[k] * bases[k].values(idx[k]);
    }
    amp *= std::conj(end(idx[slots - 1]));
    out.push_back({idx, amp, d.dt() * functional});

    std::size_t pos = slots;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < dim) break;
      idx[pos] = 0;
      if (pos == 0) return out;
    }
  }
}

Complex path_sum(const std::vector<PathRecord>& paths) {
  Complex s{};
  for (const auto& p : paths) s += p.amplitude;
  return s;
}

Complex counting_weighted_sum(const std::vector<PathRecord>& paths, double lambda) {
  Complex s{};
  for (const auto& p : paths) s += std::exp(kI * lambda * p.functional) * p.amplitude;
  return s;
}

UnitaryOperator kicked_product(const DiscretizedDrive& d, const PathFunctional& f, double lambda) {
  check_functional(d, f);
  const double dt = d.dt();
  Matrix u = identity(d.dim());
  for (std::size_t k = 0; k < d.step_count(); ++k) {
    const HermitianOperator h =
        d.steps()[k].hamiltonian - f.observables[k].scaled(lambda * f.weights[k]);
    u = expm_unitary(h, dt).matrix() * u;
  }
  const std::size_t n = d.step_count();
  u = expm_unitary(f.observables[n], -lambda * dt * f.weights[n]).matrix() * u;
  return UnitaryOperator(u);
}

DeltaConvention parse_delta_convention(const std::string& name) {
  if (name == "terminal") return DeltaConvention::terminal;
  if (name == "last-interval") return DeltaConvention::last_interval;
  throw ValidationError("unknown delta convention '" + name + "' (terminal | last-interval)");
}

PathFunctional boundary_delta_functional(const DiscretizedDrive& d, DeltaConvention convention) {
  const std::size_t n = d.step_count();
  PathFunctional f;
  for (const auto& s : d.steps()) f.observables.push_back(s.hamiltonian);
  f.observables.push_back(d.final_hamiltonian());
  f.weights.assign(n + 1, 0.0);
  const double kick = 1.0 / d.dt();
  f.weights[0] -= kick;
  if (convention == DeltaConvention::terminal) {
    f.weights[n] += kick;
  } else {
    f.weights[n - 1] += kick;
  }
  return f;
}

PathFunctional uniform_functional(const HermitianOperator& a, std::size_t steps, double weight) {
  PathFunctional f;
  f.observables.assign(steps + 1, a);
  f.weights.assign(steps + 1, weight);
  return f;
}

}  // namespace qfcs
