#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qfcs/linalg.hpp"

namespace qfcs {

/// A time-dependent system Hamiltonian H_S(t) on [0, duration]. The set of
/// Hamiltonians must be a deterministic function of t with fixed dimension.
class DriveProtocol {
 public:
  using Generator = std::function<HermitianOperator(double)>;

  DriveProtocol(std::string label, double duration, std::size_t dim, Generator generator);

  /// H_S(t); throws ValidationError when t is outside [0, duration] or the
  /// generator returns the wrong dimension.
  HermitianOperator hamiltonian_at(double t) const;

  const std::string& label() const { return label_; }
  double duration() const { return duration_; }
  std::size_t dim() const { return dim_; }

  static DriveProtocol constant(const HermitianOperator& h, double duration,
                                std::string label = "constant");
  /// (1 - t/T) h_start + (t/T) h_end.
  static DriveProtocol linear_ramp(const HermitianOperator& h_start, const HermitianOperator& h_end,
                                   double duration, std::string label = "linear-ramp");
  /// H(t) = omega0 sigma_z + amplitude (cos(w t) sigma_x + sin(w t) sigma_y).
  static DriveProtocol rabi(double omega0, double amplitude, double frequency, double duration);
  /// Qubit with gap interpolating linearly: H(t) = gap(t)/2 sigma_z.
  static DriveProtocol gap_ramp(double gap_start, double gap_end, double duration);
  /// Piecewise-constant protocol; segment i covers [edges[i], edges[i+1]).
  /// The last Hamiltonian also applies at t = duration.
  static DriveProtocol piecewise(std::vector<double> edges, std::vector<HermitianOperator> pieces,
                                 std::string label = "piecewise");
  /// H_rev(t) = H(T - t).
  static DriveProtocol time_reversed(const DriveProtocol& p);

 private:
  std::string label_;
  double duration_;
  std::size_t dim_;
  Generator generator_;
};

struct DriveStep {
  double time;
  HermitianOperator hamiltonian;
};

/// Step sequence H_S^k sampled at t_k = k dt for k = 0..N-1, together with the
/// two boundary Hamiltonians H_S(0) and H_S(T) that the detector couples to.
class DiscretizedDrive {
 public:
  /// Throws ValidationError on empty steps, non-positive dt, inconsistent
  /// dimensions or times that are not k*dt.
  DiscretizedDrive(std::vector<DriveStep> steps, double dt, HermitianOperator initial,
                   HermitianOperator final, std::string label = {});

  const std::vector<DriveStep>& steps() const { return steps_; }
  std::size_t step_count() const { return steps_.size(); }
  double dt() const { return dt_; }
  double duration() const { return dt_ * static_cast<double>(steps_.size()); }
  std::size_t dim() const { return initial_.dim(); }
  const HermitianOperator& initial_hamiltonian() const { return initial_; }
  const HermitianOperator& final_hamiltonian() const { return final_; }
  const std::string& label() const { return label_; }

  /// Same steps with c * identity added to every step and both boundaries.
  DiscretizedDrive shifted(double c) const;

 private:
  std::vector<DriveStep> steps_;
  double dt_;
  HermitianOperator initial_;
  HermitianOperator final_;
  std::string label_;
};

/// Left-endpoint sampling with dt = T/N. Throws ValidationError for N < 1.
DiscretizedDrive discretize(const DriveProtocol& p, int steps);

/// A single step of length `duration` whose propagator is exactly `target`,
/// with `boundary` as both H_S(0) and H_S(T).
DiscretizedDrive single_step_drive(const UnitaryOperator& target, const HermitianOperator& boundary,
                                   double duration, std::string label = "single-step");

/// Ordered product exp(-i dt H^{N-1}) ... exp(-i dt H^0).
UnitaryOperator evolution_operator(const DiscretizedDrive& d);

struct StepChoice {
  int steps = 0;
  double estimate = 0.0;  // ||U_N - U_2N||_max at the chosen N
  bool converged = false;
};

/// Smallest power-of-two N >= min_steps with ||U_N - U_2N||_max <= tol; stops
/// at max_steps and reports converged = false in that case.
StepChoice choose_step_count(const DriveProtocol& p, double tol = 1e-6, int min_steps = 1,
                             int max_steps = 1 << 20);

}  // namespace qfcs
