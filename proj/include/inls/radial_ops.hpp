#pragma once

#include <span>
#include <vector>

#include "inls/field.hpp"
#include "inls/grid.hpp"

namespace inls {

// Finite-volume radial Laplacian Lap_h = d_rr + (N-1)/r d_r on a cell-centered
// grid, stored as three diagonals:
//
//   (Lap_h u)_j = lower_j u_{j-1} + diag_j u_j + upper_j u_{j+1}
//
// with the even reflection u_{-1} = u_0 at the origin (zero flux through the
// face r = 0) and the Dirichlet ghost u_M = 0 beyond r_max. Lap_h is
// self-adjoint in the cell-weighted inner product and
//   <u, -Lap_h u>_w = gradient_norm_sq(u)
// holds exactly.
struct RadialLaplacian {
  explicit RadialLaplacian(const RadialGrid& grid);

  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  std::size_t size() const noexcept { return diag.size(); }

  void apply(std::span<const Complex> u, std::span<Complex> out) const;
  std::vector<double> apply(std::span<const double> u) const;
};

// Face differences (u_{f+1} - u_f) / dr for f = 0..M-1, with u_M = 0.
std::vector<Complex> face_derivative(const FieldState& u);

// Face averages (u_f + u_{f+1}) / 2 with u_M = 0.
std::vector<Complex> face_average(const FieldState& u);

// Thomas algorithm for a tridiagonal system with coefficients of type T.
// lower[0] and upper[n-1] are ignored. Throws SolverError on a zero pivot.
template <class T>
void solve_tridiagonal(std::span<const T> lower, std::span<const T> diag, std::span<const T> upper,
                       std::span<T> rhs_inout, std::vector<T>& scratch);

}  // namespace inls
