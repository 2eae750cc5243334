#include "inls/radial_ops.hpp"

#include <cmath>

#include "inls/error.hpp"

namespace inls {

RadialLaplacian::RadialLaplacian(const RadialGrid& grid)
    : lower(grid.size(), 0.0), diag(grid.size(), 0.0), upper(grid.size(), 0.0) {
  const std::size_t n = grid.size();
  const double inv_dr2 = 1.0 / (grid.dr() * grid.dr());
  const auto w = grid.weights();
  const auto fw = grid.face_weights();
  for (std::size_t j = 0; j < n; ++j) {
    // Flux through the outer face of cell j; at j = n-1 it couples to the
    // Dirichlet ghost and only enters the diagonal.
    const double out = fw[j] * inv_dr2 / w[j];
    const double in = j == 0 ? 0.0 : fw[j - 1] * inv_dr2 / w[j];
    lower[j] = in;
    upper[j] = j + 1 < n ? out : 0.0;
    diag[j] = -(in + out);
  }
}

void RadialLaplacian::apply(std::span<const Complex> u, std::span<Complex> out) const {
  const std::size_t n = size();
  for (std::size_t j = 0; j < n; ++j) {
    Complex s = diag[j] * u[j];
    if (j > 0) s += lower[j] * u[j - 1];
    if (j + 1 < n) s += upper[j] * u[j + 1];
    out[j] = s;
  }
}

std::vector<double> RadialLaplacian::apply(std::span<const double> u) const {
  const std::size_t n = size();
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = diag[j] * u[j];
    if (j > 0) s += lower[j] * u[j - 1];
    if (j + 1 < n) s += upper[j] * u[j + 1];
    out[j] = s;
  }
  return out;
}

std::vector<Complex> face_derivative(const FieldState& u) {
  const std::size_t n = u.size();
  const double inv_dr = 1.0 / u.grid().dr();
  std::vector<Complex> d(n);
  for (std::size_t f = 0; f < n; ++f) {
    const Complex right = f + 1 < n ? u[f + 1] : Complex{};
    d[f] = (right - u[f]) * inv_dr;
  }
  return d;
}

std::vector<Complex> face_average(const FieldState& u) {
  const std::size_t n = u.size();
  std::vector<Complex> a(n);
  for (std::size_t f = 0; f < n; ++f) {
    const Complex right = f + 1 < n ? u[f + 1] : Complex{};
    a[f] = 0.5 * (right + u[f]);
  }
  return a;
}

template <class T>
void solve_tridiagonal(std::span<const T> lower, std::span<const T> diag, std::span<const T> upper,
                       std::span<T> rhs, std::vector<T>& scratch) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n) {
    throw ValidationError("tridiagonal solve: inconsistent sizes");
  }
  if (n == 0) return;
  scratch.resize(n);
  T pivot = diag[0];
  if (std::abs(pivot) == 0.0) throw SolverError("tridiagonal solve: zero pivot at row 0");
  scratch[0] = n > 1 ? upper[0] / pivot : T{};
  rhs[0] /= pivot;
  for (std::size_t j = 1; j < n; ++j) {
    pivot = diag[j] - lower[j] * scratch[j - 1];
    if (std::abs(pivot) == 0.0 || !std::isfinite(std::abs(pivot))) {
      throw SolverError("tridiagonal solve: breakdown at row " + std::to_string(j));
    }
    scratch[j] = j + 1 < n ? upper[j] / pivot : T{};
    rhs[j] = (rhs[j] - lower[j] * rhs[j - 1]) / pivot;
  }
  for (std::size_t j = n - 1; j-- > 0;) rhs[j] -= scratch[j] * rhs[j + 1];
}

template void solve_tridiagonal<double>(std::span<const double>, std::span<const double>,
                                        std::span<const double>, std::span<double>,
                                        std::vector<double>&);
template void solve_tridiagonal<Complex>(std::span<const Complex>, std::span<const Complex>,
                                         std::span<const Complex>, std::span<Complex>,
                                         std::vector<Complex>&);

}  // namespace inls
