#pragma once

#include <optional>
#include <string>

namespace inls {

enum class Regime { case1_finite, case2_rate, out_of_theorem };

std::string to_string(Regime r);

// Tolerance used when comparing derived exponents against their critical
// values (alpha == 1, s_c == 0, s_c == 1). Rational powers such as p = 7/3 are
// not representable exactly.
inline constexpr double kCriticalTolerance = 1e-12;

// Model triple (N, b, p) of
//   i u_t + Lap u + |x|^{-b} |u|^{p-1} u = 0.
//
// Construction enforces 1 <= N <= 5, 0 <= b < min(2, N), p > 1. b = 0 is the
// classical NLS and is accepted as a degenerate reference mode; stricter
// ranges are checked on demand by the require_* members.
class ModelParams {
 public:
  ModelParams(int dimension, double b, double p);

  int dimension() const noexcept { return dimension_; }
  double b() const noexcept { return b_; }
  double p() const noexcept { return p_; }

  bool degenerate() const noexcept { return b_ == 0.0; }

  // s_c = N/2 - (2-b)/(p-1)
  double critical_regularity() const noexcept;
  // alpha = N(p-1)/4
  double alpha() const noexcept;
  // b / (2 alpha - 2); empty when alpha <= 1 (within kCriticalTolerance).
  std::optional<double> rate_exponent() const noexcept;
  // (2-b)/(p-1), the amplitude exponent of the scaling symmetry.
  double scaling_exponent() const noexcept;
  // Coefficient (N(p-1)+2b) / (2(p+1)) of the potential term in K(u).
  double virial_coefficient() const noexcept;

  // 2* = +inf for N <= 2, 1 + (4-2b)/(N-2) otherwise.
  double sobolev_exponent() const noexcept;

  bool energy_subcritical() const noexcept { return p_ < sobolev_exponent(); }
  bool intercritical() const noexcept;
  // Extra restriction b < 4/N for N >= 3 under which the blow-up theorem is stated.
  bool theorem_range() const noexcept;
  Regime regime() const noexcept;

  // Throws ValidationError when 1 < p < 2* fails (no H^1 ground state).
  void require_energy_subcritical() const;
  void require_intercritical() const;

  std::string describe() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  int dimension_;
  double b_;
  double p_;
};

}  // namespace inls
