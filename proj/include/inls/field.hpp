#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "inls/grid.hpp"

namespace inls {

using Complex = std::complex<double>;

// Complex radial profile u(r_j) at time t on a shared grid.
class FieldState {
 public:
  FieldState(GridPtr grid, std::vector<Complex> values, double t = 0.0);

  static FieldState zeros(GridPtr grid, double t = 0.0);
  static FieldState from_function(GridPtr grid, const std::function<Complex(double)>& f,
                                  double t = 0.0);
  static FieldState from_real(GridPtr grid, std::span<const double> values, double t = 0.0);

  const RadialGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const Complex> values() const noexcept { return values_; }
  std::span<Complex> values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  const Complex& operator[](std::size_t j) const { return values_[j]; }
  Complex& operator[](std::size_t j) { return values_[j]; }

  double time() const noexcept { return t_; }
  void set_time(double t) noexcept { t_ = t; }

  bool all_finite() const noexcept;
  // Throws BlowupSignal if any amplitude is NaN/Inf.
  void require_finite() const;

  bool is_real(double tolerance = 0.0) const noexcept;
  std::vector<double> real_part() const;
  std::vector<double> modulus() const;

  FieldState scaled(double c) const;

 private:
  GridPtr grid_;
  std::vector<Complex> values_;
  double t_;
};

}  // namespace inls
