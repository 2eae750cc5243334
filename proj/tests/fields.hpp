#pragma once

// Reproducible smooth random fields for identity checks.

#include <cmath>
#include <random>

#include "inls/field.hpp"

namespace testfields {

// Sum of three Gaussian bumps with random complex amplitudes, centers in
// [0, 4 scale] and widths in [0.3, 1.5] scale, times a random chirp e^{i k r}.
// Negligible beyond 10 scale.
inline inls::FieldState random_smooth(inls::GridPtr grid, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> amp(-2.0, 2.0), center(0.0, 4.0), width(0.3, 1.5),
      chirp(-3.0, 3.0);
  struct Bump {
    std::complex<double> a;
    double c, w;
  } bumps[3];
  for (auto& b : bumps) {
    const double re = amp(rng), im = amp(rng);
    b = {{re, im}, center(rng) * scale, width(rng) * scale};
  }
  const double k = chirp(rng) / scale;
  return inls::FieldState::from_function(grid, [&](double r) {
    std::complex<double> s = 0.0;
    for (const auto& b : bumps) {
      const double x = (r - b.c) / b.w;
      s += b.a * std::exp(-x * x);
    }
    return s * std::polar(1.0, k * r);
  });
}

}  // namespace testfields
