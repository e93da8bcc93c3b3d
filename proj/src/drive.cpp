#include "qfcs/drive.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qfcs/error.hpp"

namespace qfcs {

DriveProtocol::DriveProtocol(std::string label, double duration, std::size_t dim,
                             Generator generator)
    : label_(std::move(label)), duration_(duration), dim_(dim), generator_(std::move(generator)) {
  if (!(duration_ > 0.0) || !std::isfinite(duration_)) {
    throw ValidationError("DriveProtocol '" + label_ + "': duration must be positive");
  }
  if (dim_ < 1) throw ValidationError("DriveProtocol '" + label_ + "': dimension must be >= 1");
  if (!generator_) throw ValidationError("DriveProtocol '" + label_ + "': empty generator");
}

HermitianOperator DriveProtocol::hamiltonian_at(double t) const {
  if (!(t >= 0.0 && t <= duration_ * (1.0 + 1e-12))) {
    std::ostringstream os;
    os << "DriveProtocol '" << label_ << "': time " << t << " outside [0, " << duration_ << "]";
    throw ValidationError(os.str());
  }
  HermitianOperator h = generator_(std::min(t, duration_));
  if (h.dim() != dim_) {
    std::ostringstream os;
    os << "DriveProtocol '" << label_ << "': generator returned dimension " << h.dim()
       << " at t = " << t << ", expected " << dim_;
    throw ValidationError(os.str());
  }
  return h;
}

DriveProtocol DriveProtocol::constant(const HermitianOperator& h, double duration,
                                      std::string label) {
  return DriveProtocol(std::move(label), duration, h.dim(), [h](double) { return h; });
}

DriveProtocol DriveProtocol::linear_ramp(const HermitianOperator& h_start,
                                         const HermitianOperator& h_end, double duration,
                                         std::string label) {
  if (h_start.dim() != h_end.dim()) throw ValidationError("linear_ramp: dimension mismatch");
  return DriveProtocol(std::move(label), duration, h_start.dim(),
                       [h_start, h_end, duration](double t) {
                         const double s = t / duration;
                         return h_start.scaled(1.0 - s) + h_end.scaled(s);
                       });
}

DriveProtocol DriveProtocol::rabi(double omega0, double amplitude, double frequency,
                                  double duration) {
  const Matrix sx = pauli::x();
  const Matrix sy = pauli::y();
  const Matrix sz = pauli::z();
  return DriveProtocol("rabi", duration, 2, [=](double t) {
    return HermitianOperator(omega0 * sz +
                             amplitude * (std::cos(frequency * t) * sx + std::sin(frequency * t) * sy));
  });
}

DriveProtocol DriveProtocol::gap_ramp(double gap_start, double gap_end, double duration) {
  const Matrix sz = pauli::z();
  return DriveProtocol("gap-ramp", duration, 2, [=](double t) {
    const double gap = gap_start + (gap_end - gap_start) * t / duration;
    return HermitianOperator(0.5 * gap * sz);
  });
}

DriveProtocol DriveProtocol::piecewise(std::vector<double> edges,
                                       std::vector<HermitianOperator> pieces, std::string label) {
  if (pieces.empty() || edges.size() != pieces.size() + 1) {
    throw ValidationError("piecewise: need one more edge than pieces");
  }
  if (edges.front() != 0.0) throw ValidationError("piecewise: first edge must be 0");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw ValidationError("piecewise: edges must increase");
    if (pieces[i - 1].dim() != pieces.front().dim()) {
      throw ValidationError("piecewise: pieces must share one dimension");
    }
  }
  const double duration = edges.back();
  const std::size_t dim = pieces.front().dim();
  return DriveProtocol(std::move(label), duration, dim,
                       [edges = std::move(edges), pieces = std::move(pieces)](double t) {
                         std::size_t seg = 0;
                         while (seg + 1 < pieces.size() && t >= edges[seg + 1]) ++seg;
                         return pieces[seg];
                       });
}

DriveProtocol DriveProtocol::time_reversed(const DriveProtocol& p) {
  const double T = p.duration();
  return DriveProtocol(p.label() + "-reversed", T, p.dim(),
                       [p, T](double t) { return p.hamiltonian_at(T - t); });
}

// ---------------------------------------------------------------------------

DiscretizedDrive::DiscretizedDrive(std::vector<DriveStep> steps, double dt,
                                   HermitianOperator initial, HermitianOperator final,
                                   std::string label)
    : steps_(std::move(steps)),
      dt_(dt),
      initial_(std::move(initial)),
      final_(std::move(final)),
      label_(std::move(label)) {
  if (steps_.empty()) throw ValidationError("DiscretizedDrive: need at least one step");
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw ValidationError("DiscretizedDrive: dt must be positive");
  if (final_.dim() != initial_.dim()) {
    throw ValidationError("DiscretizedDrive: boundary Hamiltonians differ in dimension");
  }
  for (std::size_t k = 0; k < steps_.size(); ++k) {
    if (steps_[k].hamiltonian.dim() != initial_.dim()) {
      std::ostringstream os;
      os << "DiscretizedDrive: step " << k << " has dimension " << steps_[k].hamiltonian.dim()
         << ", expected " << initial_.dim();
      throw ValidationError(os.str());
    }
    const double expected = dt_ * static_cast<double>(k);
    if (std::abs(steps_[k].time - expected) > 1e-12 * std::max(1.0, expected)) {
      throw ValidationError("DiscretizedDrive: step times must be k*dt");
    }
  }
}

DiscretizedDrive DiscretizedDrive::shifted(double c) const {
  std::vector<DriveStep> steps;
  steps.reserve(steps_.size());
  for (const auto& s : steps_) steps.push_back({s.time, s.hamiltonian.shifted(c)});
  return DiscretizedDrive(std::move(steps), dt_, initial_.shifted(c), final_.shifted(c), label_);
}

DiscretizedDrive discretize(const DriveProtocol& p, int steps) {
  if (steps < 1) throw ValidationError("discretize: step count must be >= 1");
  const double dt = p.duration() / steps;
  std::vector<DriveStep> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    out.push_back({t, p.hamiltonian_at(t)});
  }
  return DiscretizedDrive(std::move(out), dt, p.hamiltonian_at(0.0),
                          p.hamiltonian_at(p.duration()), p.label());
}

DiscretizedDrive single_step_drive(const UnitaryOperator& target, const HermitianOperator& boundary,
                                   double duration, std::string label) {
  if (target.dim() != boundary.dim()) throw ValidationError("single_step_drive: dimension mismatch");
  std::vector<DriveStep> steps{{0.0, hermitian_generator(target, duration)}};
  return DiscretizedDrive(std::move(steps), duration, boundary, boundary, std::move(label));
}

UnitaryOperator evolution_operator(const DiscretizedDrive& d) {
  Matrix u = identity(d.dim());
  for (const auto& step : d.steps()) {
    u = expm_unitary(step.hamiltonian, d.dt()).matrix() * u;
  }
  // Unitarity defects of the factors add up linearly in N; replace the
  // product by its polar factor once they become visible.
  if (max_abs(u.adjoint() * u - identity(d.dim())) > 1e-13) {
    Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
    u = svd.matrixU() * svd.matrixV().adjoint();
  }
  return UnitaryOperator(u);
}

StepChoice choose_step_count(const DriveProtocol& p, double tol, int min_steps, int max_steps) {
  if (min_steps < 1 || max_steps < min_steps) throw ValidationError("choose_step_count: bad bounds");
  int n = 1;
  while (n < min_steps) n *= 2;
  Matrix coarse = evolution_operator(discretize(p, n)).matrix();
  StepChoice choice;
  while (true) {
    const Matrix fine = evolution_operator(discretize(p, 2 * n)).matrix();
    choice.steps = n;
    choice.estimate = max_abs(coarse - fine);
    if (choice.estimate <= tol) {
      choice.converged = true;
      return choice;
    }
    if (2 * n > max_steps) return choice;
    n *= 2;
    coarse = fine;
  }
}

}  // namespace qfcs
