#include "inls/grid.hpp"

#include <cmath>
#include <numbers>

#include "inls/error.hpp"

namespace inls {

double unit_sphere_measure(int dimension) {
  constexpr double pi = std::numbers::pi;
  switch (dimension) {
    case 1: return 2.0;
    case 2: return 2.0 * pi;
    case 3: return 4.0 * pi;
    case 4: return 2.0 * pi * pi;
    case 5: return 8.0 * pi * pi / 3.0;
    default: throw ValidationError("unsupported dimension " + std::to_string(dimension));
  }
}

RadialGrid::RadialGrid(int dimension, double r_max, std::size_t cells)
    : dimension_(dimension), r_max_(r_max), dr_(0.0) {
  if (dimension < 1 || dimension > 5) {
    throw ValidationError("grid dimension must be in 1..5");
  }
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw ValidationError("grid radius r_max must be positive and finite");
  }
  if (cells < 1) throw ValidationError("grid needs at least one cell");

  dr_ = r_max / static_cast<double>(cells);
  const double sigma = unit_sphere_measure(dimension);
  const double n = dimension;

  nodes_.resize(cells);
  weights_.resize(cells);
  faces_.resize(cells);
  face_weights_.resize(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    nodes_[j] = (static_cast<double>(j) + 0.5) * dr_;
    weights_[j] = sigma * std::pow(nodes_[j], n - 1.0) * dr_;
    faces_[j] = static_cast<double>(j + 1) * dr_;
  }
  // The midpoint sum of r^{N-1} undershoots the ball volume by O(dr^2) for
  // N >= 3; the outermost cell absorbs the deficit.
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < cells; ++j) total += weights_[j];
  weights_[cells - 1] = ball_volume() - total;

  // W_f = N V_f dr / r_f with V_f the discrete volume enclosed by face f.
  // This makes Lap_h r^2 = 2N on every interior cell and N (u_1 - u_0)/dr^2
  // at the origin cell, matching N u''(0).
  double enclosed = 0.0;
  for (std::size_t j = 0; j < cells; ++j) {
    enclosed += weights_[j];
    face_weights_[j] = n * enclosed * dr_ / faces_[j];
  }
}

double RadialGrid::ball_volume() const noexcept {
  return unit_sphere_measure(dimension_) * std::pow(r_max_, dimension_) / dimension_;
}

std::size_t RadialGrid::first_node_beyond(double radius) const noexcept {
  if (radius < 0.0) return 0;
  const double k = std::floor(radius / dr_ - 0.5) + 1.0;
  std::size_t j = k <= 0.0 ? 0 : static_cast<std::size_t>(k);
  while (j > 0 && nodes_[j - 1] > radius) --j;
  while (j < nodes_.size() && nodes_[j] <= radius) ++j;
  return j;
}

}  // namespace inls
