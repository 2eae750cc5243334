#include "inls/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "inls/error.hpp"
#include "inls/kernels/kernels.hpp"

namespace inls {

namespace {

double checked(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw BlowupSignal(std::string(what) + " is not finite; field has lost regularity");
  }
  return value;
}

// (|z|^2)^{(p+1)/2}
inline double abs_pow(const Complex& z, double half_exponent) {
  const double a2 = std::norm(z);
  if (half_exponent == 2.0) return a2 * a2;
  if (half_exponent == 1.0) return a2;
  return std::pow(a2, half_exponent);
}

}  // namespace

double mass(const FieldState& u) {
  const auto w = u.grid().weights();
  return checked(kernels::active().weighted_abs2(w.data(), u.values().data(), u.size()), "mass");
}

double l2_norm(const FieldState& u) { return std::sqrt(mass(u)); }

double gradient_norm_sq(const FieldState& u) {
  const RadialGrid& g = u.grid();
  if (g.size() < 4) throw ValidationError("gradient_norm_sq needs at least 4 cells");
  const double s = kernels::active().face_diff_abs2(g.face_weights().data(), u.values().data(),
                                                    u.size());
  return checked(s / (g.dr() * g.dr()), "gradient norm");
}

std::vector<double> inverse_power_table(const RadialGrid& grid, double b) {
  std::vector<double> t(grid.size(), 1.0);
  if (b == 0.0) return t;
  // Average of r^{-b} over the shell [j dr, (j+1) dr] with respect to
  // r^{N-1} dr. Sampling r_j^{-b} instead costs O(dr^{N-b}) at the origin
  // cell, which is first order or worse for N = 1.
  const double n = grid.dimension();
  const double dr = grid.dr();
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double lo = static_cast<double>(j) * dr;
    const double hi = static_cast<double>(j + 1) * dr;
    const double num = (std::pow(hi, n - b) - std::pow(lo, n - b)) / (n - b);
    const double den = (std::pow(hi, n) - std::pow(lo, n)) / n;
    t[j] = num / den;
  }
  return t;
}

std::vector<double> potential_density(const FieldState& u, const ModelParams& params) {
  std::vector<double> d = inverse_power_table(u.grid(), params.b());
  const double h = 0.5 * (params.p() + 1.0);
  for (std::size_t j = 0; j < d.size(); ++j) d[j] *= abs_pow(u[j], h);
  return d;
}

double weighted_potential(const FieldState& u, const ModelParams& params) {
  const auto dens = potential_density(u, params);
  const auto w = u.grid().weights();
  return checked(kernels::active().dot(w.data(), dens.data(), dens.size()), "potential");
}

double exterior_potential(const FieldState& u, const ModelParams& params, double radius) {
  const auto dens = potential_density(u, params);
  const auto w = u.grid().weights();
  const std::size_t first = u.grid().first_node_beyond(radius);
  if (first >= dens.size()) return 0.0;
  return checked(kernels::active().dot(w.data() + first, dens.data() + first, dens.size() - first),
                 "exterior potential");
}

double energy(const FieldState& u, const ModelParams& params) {
  return 0.5 * gradient_norm_sq(u) - weighted_potential(u, params) / (params.p() + 1.0);
}

double k_functional(const FieldState& u, const ModelParams& params) {
  return gradient_norm_sq(u) - params.virial_coefficient() * weighted_potential(u, params);
}

double second_moment(const FieldState& u) {
  const auto r = u.grid().nodes();
  const auto w = u.grid().weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) acc += w[j] * r[j] * r[j] * std::norm(u[j]);
  return checked(acc, "second moment");
}

FieldSummary summarize(const FieldState& u, const ModelParams& params) {
  FieldSummary s;
  s.mass = mass(u);
  s.gradient_norm_sq = gradient_norm_sq(u);
  s.potential = weighted_potential(u, params);
  s.energy = 0.5 * s.gradient_norm_sq - s.potential / (params.p() + 1.0);
  s.k = s.gradient_norm_sq - params.virial_coefficient() * s.potential;
  return s;
}

Complex interpolate(const FieldState& u, double r) {
  const std::size_t n = u.size();
  const double dr = u.grid().dr();
  r = std::abs(r);
  if (r >= u.grid().r_max() + 2.0 * dr) return {};

  // Node index coordinate: r_j = (j + 1/2) dr.
  const double x = r / dr - 0.5;
  const auto i0 = static_cast<long>(std::floor(x));
  const double t = x - static_cast<double>(i0);

  auto at = [&](long k) -> Complex {
    if (k < 0) k = -1 - k;  // even reflection about r = 0
    if (k >= static_cast<long>(n)) return {};
    return u[static_cast<std::size_t>(k)];
  };

  // Cubic Lagrange weights on nodes i0-1, i0, i0+1, i0+2.
  const double wm = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  const double w1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  const double w2 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return wm * at(i0 - 1) + w0 * at(i0) + w1 * at(i0 + 1) + w2 * at(i0 + 2);
}

FieldState apply_scaling(const FieldState& u, const ModelParams& params, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("scaling factor lambda must be positive");
  }
  u.require_finite();
  if (lambda == 1.0) return u;

  const RadialGrid& g = u.grid();
  if (lambda < 1.0) {
    double peak = 0.0;
    for (const auto& z : u.values()) peak = std::max(peak, std::abs(z));
    const std::size_t first = g.first_node_beyond(lambda * g.r_max());
    double outside = 0.0;
    for (std::size_t j = first; j < u.size(); ++j) outside = std::max(outside, std::abs(u[j]));
    if (peak > 0.0 && outside > 1e-6 * peak) {
      throw ValidationError("resolution error: rescaled support leaves the grid (lambda = " +
                            std::to_string(lambda) + ")");
    }
  }

  const double amp = std::pow(lambda, params.scaling_exponent());
  std::vector<Complex> v(u.size());
  const auto r = g.nodes();
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = amp * interpolate(u, lambda * r[j]);
  return FieldState(u.grid_ptr(), std::move(v), u.time() / (lambda * lambda));
}

}  // namespace inls
