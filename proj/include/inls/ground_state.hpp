#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "inls/field.hpp"
#include "inls/params.hpp"

namespace inls {

enum class GroundStateMethod { fixed_point_renormalization, shooting };

std::string to_string(GroundStateMethod m);
GroundStateMethod parse_ground_state_method(const std::string& s);

struct GroundStateOptions {
  GroundStateMethod method = GroundStateMethod::fixed_point_renormalization;
  int max_iterations = 10000;
  // Relative successive-iterate change and residual / ||Q|| targets.
  double change_tolerance = 1e-10;
  double residual_tolerance = 1e-8;
  // Initial guess amplitude * exp(-r^2).
  double initial_amplitude = 1.0;
  std::size_t min_cells = 512;
};

// Positive radial solution of -Q + Lap Q + |x|^{-b} |Q|^{p-1} Q = 0.
struct GroundState {
  ModelParams params;
  FieldState profile;
  double mass_Q = 0.0;
  double energy_Q = 0.0;
  double grad_Q = 0.0;  // ||grad Q||_{L^2}
  // E(Q)^{s_c} M(Q)^{1-s_c} and ||grad Q||^{s_c} ||Q||^{1-s_c}; empty outside
  // the range where they are defined (E(Q) <= 0 with s_c > 0).
  std::optional<double> threshold_EM;
  std::optional<double> threshold_GM;
  double residual = 0.0;         // discrete L^2 norm of the elliptic residual
  double pohozaev_defect = 0.0;  // K(Q) / ||grad Q||^2
  GroundStateMethod method = GroundStateMethod::fixed_point_renormalization;
  int iterations = 0;
};

GroundState solve_ground_state(const ModelParams& params, GridPtr grid,
                               const GroundStateOptions& options = {});

// || -Q + Lap_h Q + r^{-b} |Q|^{p-1} Q ||_{L^2}
double elliptic_residual(const FieldState& q, const ModelParams& params);

struct Thresholds {
  double em;
  double gm;
};

// Throws SolverError when E(Q) <= 0 while s_c > 0 (the product is then not a
// real power); s_c = 0 and s_c = 1 degenerate to M(Q), ||Q|| and E(Q),
// ||grad Q|| exactly.
Thresholds threshold_quantities(const GroundState& gs, const ModelParams& params);

// Recomputes the invariants of a given positive profile (used by both solvers
// and by the profile loader).
GroundState make_ground_state(const ModelParams& params, FieldState profile,
                              GroundStateMethod method, int iterations);

// Profile file:
//   # key = value        header lines (N, b, p, r_max, M, mass_Q, energy_Q,
//                        grad_Q, residual, method, iterations)
//   r,value              column header
//   <r>,<value>          one row per node, 17 significant digits
void write_profile(const GroundState& gs, const std::filesystem::path& path);
GroundState read_profile(const std::filesystem::path& path);

}  // namespace inls
