#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "inls/field.hpp"
#include "inls/params.hpp"
#include "inls/radial_ops.hpp"

namespace inls {

struct EvolutionConfig {
  double dt_initial = 1e-3;
  double dt_min = 1e-12;
  double t_final = 1.0;
  // dt = min(dt_initial, c_adapt / max(1, ||grad u||^2)); adaptive = false
  // keeps dt_initial throughout.
  double c_adapt = 0.01;
  bool adaptive = true;
  // Cap on the nonlinear phase increment per step, max_j dt r^{-b}|u_j|^{p-1}
  // (radians). The singular weight makes this frequency grow like dr^{-b} at
  // the origin cell; without the cap the splitting error is O(1) there.
  double max_phase_step = 0.1;
  double blowup_gradient_factor = 1e3;
  int record_stride = 1;
  // Optional guard on max_j ||u_{j+1}| - |u_j|| / max_j |u_j|: beyond it the
  // run stops with numerical_failure. Off by default; collapse at the origin
  // is sharp on the grid scale well before any gradient trigger fires.
  double resolution_limit = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;

  void validate() const;
  // Same rule with dt_initial, c_adapt, max_phase_step and dt_min divided by
  // `factor`.
  EvolutionConfig refined(double factor) const;
};

enum class RunStatus { completed_horizon, blowup_detected, step_underflow, numerical_failure };

std::string to_string(RunStatus s);

struct TimeSeriesRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double grad_norm_sq = 0.0;
  double K = 0.0;
  double I = 0.0;
  double Iprime = 0.0;
  double Idoubleprime = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  double R3 = 0.0;
  double delta_instant = 0.0;
  double R_cutoff = 0.0;
};

// Maps a state to its diagnostics row. The virial columns are left NaN by
// basic_record; the runner installs a recorder that fills them.
using Recorder = std::function<TimeSeriesRecord(const FieldState&)>;
TimeSeriesRecord basic_record(const FieldState& u, const ModelParams& params);

struct RunOutcome {
  RunStatus status = RunStatus::completed_horizon;
  double t_end = 0.0;
  std::vector<TimeSeriesRecord> series;
  std::string reason;
  std::size_t steps = 0;
  double grad_initial = 0.0;  // ||grad u0||
  double grad_final = 0.0;
  std::optional<FieldState> final_state;
};

// One Strang step: half nonlinear phase, Crank-Nicolson for i u_t = -Lap_h u,
// half nonlinear phase. Reuses the operator tables for a fixed grid.
class Stepper {
 public:
  Stepper(const ModelParams& params, GridPtr grid);

  // Advances u in place by dt > 0. Throws SolverError on breakdown.
  void advance(FieldState& u, double dt);

  // max_j r^{-b} |u_j|^{p-1}, the fastest local nonlinear frequency.
  double max_frequency(const FieldState& u) const;

  const ModelParams& params() const noexcept { return params_; }

 private:
  void phase(std::span<Complex> u, double h) const;

  ModelParams params_;
  GridPtr grid_;
  RadialLaplacian lap_;
  std::vector<double> potential_;  // r^{-b} table
  // Factorization of I - i tau Lap_h for the current tau.
  std::vector<Complex> sub_, cprime_, inv_pivot_, rhs_;
  double tau_ = -1.0;
};

FieldState step(const FieldState& u, const ModelParams& params, double dt);

// Never throws past the outcome: failures are encoded in the status.
RunOutcome evolve(const FieldState& u0, const ModelParams& params, const EvolutionConfig& cfg,
                  const Recorder& recorder = {});

// max_j ||u_{j+1}| - |u_j|| / max_j |u_j| (0 for the zero field). The modulus
// ignores phase winding, which is resolved by the stepper's phase cap.
double resolution_ratio(const FieldState& u);

}  // namespace inls
