#pragma once

#include <vector>

#include "inls/field.hpp"
#include "inls/params.hpp"

namespace inls {

// Quadrature functionals of a radial field. All of them share the grid's
// cell weights (face weights for the gradient) and throw BlowupSignal when the
// field carries NaN/Inf.

// M(u) = int |u|^2
double mass(const FieldState& u);

// ||u||_{L^2}
double l2_norm(const FieldState& u);

// int |grad u|^2 from face differences; requires at least 4 cells.
double gradient_norm_sq(const FieldState& u);

// int |x|^{-b} |u|^{p+1}
double weighted_potential(const FieldState& u, const ModelParams& params);

// Same integrand restricted to nodes with r_j > radius.
double exterior_potential(const FieldState& u, const ModelParams& params, double radius);

// E(u) = 1/2 int |grad u|^2 - 1/(p+1) int |x|^{-b} |u|^{p+1}
double energy(const FieldState& u, const ModelParams& params);

// K(u) = int |grad u|^2 - (N(p-1)+2b)/(2(p+1)) int |x|^{-b} |u|^{p+1}
double k_functional(const FieldState& u, const ModelParams& params);

// int |x|^2 |u|^2
double second_moment(const FieldState& u);

// Cell values of r^{-b}: the average over shell j under the radial measure,
// r_j^{-b} (1 + O(dr^2 / r_j^2)) away from the origin and exactly 1 for b = 0.
std::vector<double> inverse_power_table(const RadialGrid& grid, double b);

// |u_j|^{p+1} times the r^{-b} table
std::vector<double> potential_density(const FieldState& u, const ModelParams& params);

// All of the above evaluated in one pass.
struct FieldSummary {
  double mass = 0.0;
  double gradient_norm_sq = 0.0;
  double potential = 0.0;
  double energy = 0.0;
  double k = 0.0;
};
FieldSummary summarize(const FieldState& u, const ModelParams& params);

// u_lambda(r) = lambda^{(2-b)/(p-1)} u(lambda r), resampled onto the same grid
// by four-point Lagrange interpolation (even extension at r = 0, zero beyond
// r_max). The time stamp becomes t / lambda^2, so that u_lambda(t') = lambda^a
// u(lambda x, lambda^2 t'). Throws ValidationError if lambda < 1 would push
// non-negligible amplitude (above 1e-6 of the peak) past r_max.
FieldState apply_scaling(const FieldState& u, const ModelParams& params, double lambda);

// Interpolated value of the field at radius r (same stencil as apply_scaling).
Complex interpolate(const FieldState& u, double r);

}  // namespace inls
