#include "inls/field.hpp"

#include <algorithm>
#include <cmath>

#include "inls/error.hpp"

namespace inls {

FieldState::FieldState(GridPtr grid, std::vector<Complex> values, double t)
    : grid_(std::move(grid)), values_(std::move(values)), t_(t) {
  if (!grid_) throw ValidationError("field requires a grid");
  if (values_.size() != grid_->size()) {
    throw ValidationError("field length " + std::to_string(values_.size()) +
                          " does not match grid size " + std::to_string(grid_->size()));
  }
}

FieldState FieldState::zeros(GridPtr grid, double t) {
  const std::size_t n = grid->size();
  return FieldState(std::move(grid), std::vector<Complex>(n), t);
}

FieldState FieldState::from_function(GridPtr grid, const std::function<Complex(double)>& f,
                                     double t) {
  std::vector<Complex> v(grid->size());
  const auto r = grid->nodes();
  std::transform(r.begin(), r.end(), v.begin(), f);
  return FieldState(std::move(grid), std::move(v), t);
}

FieldState FieldState::from_real(GridPtr grid, std::span<const double> values, double t) {
  std::vector<Complex> v(values.begin(), values.end());
  return FieldState(std::move(grid), std::move(v), t);
}

bool FieldState::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

void FieldState::require_finite() const {
  if (!all_finite()) {
    throw BlowupSignal("field contains non-finite amplitudes at t = " + std::to_string(t_));
  }
}

bool FieldState::is_real(double tolerance) const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [tolerance](const Complex& z) { return std::abs(z.imag()) <= tolerance; });
}

std::vector<double> FieldState::real_part() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(),
                 [](const Complex& z) { return z.real(); });
  return out;
}

std::vector<double> FieldState::modulus() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(),
                 [](const Complex& z) { return std::abs(z); });
  return out;
}

FieldState FieldState::scaled(double c) const {
  FieldState out = *this;
  for (auto& z : out.values_) z *= c;
  return out;
}

}  // namespace inls
