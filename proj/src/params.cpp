#include "inls/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "inls/error.hpp"

namespace inls {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::case1_finite: return "case1_finite";
    case Regime::case2_rate: return "case2_rate";
    case Regime::out_of_theorem: return "out_of_theorem";
  }
  return "unknown";
}

ModelParams::ModelParams(int dimension, double b, double p)
    : dimension_(dimension), b_(b), p_(p) {
  if (dimension < 1 || dimension > 5) {
    throw ValidationError("dimension N must be in 1..5, got " + std::to_string(dimension));
  }
  if (!std::isfinite(b) || !std::isfinite(p)) {
    throw ValidationError("b and p must be finite");
  }
  const double b_max = std::min(2.0, static_cast<double>(dimension));
  if (b < 0.0 || b >= b_max) {
    throw ValidationError("b must satisfy 0 <= b < min(2, N); got " + describe());
  }
  if (p <= 1.0) {
    throw ValidationError("p must exceed 1; got " + describe());
  }
}

double ModelParams::critical_regularity() const noexcept {
  return 0.5 * dimension_ - (2.0 - b_) / (p_ - 1.0);
}

double ModelParams::alpha() const noexcept { return dimension_ * (p_ - 1.0) / 4.0; }

std::optional<double> ModelParams::rate_exponent() const noexcept {
  const double a = alpha();
  if (a <= 1.0 + kCriticalTolerance) return std::nullopt;
  return b_ / (2.0 * a - 2.0);
}

double ModelParams::scaling_exponent() const noexcept { return (2.0 - b_) / (p_ - 1.0); }

double ModelParams::virial_coefficient() const noexcept {
  return (dimension_ * (p_ - 1.0) + 2.0 * b_) / (2.0 * (p_ + 1.0));
}

double ModelParams::sobolev_exponent() const noexcept {
  if (dimension_ <= 2) return std::numeric_limits<double>::infinity();
  return 1.0 + (4.0 - 2.0 * b_) / (dimension_ - 2.0);
}

bool ModelParams::intercritical() const noexcept {
  const double sc = critical_regularity();
  return sc > kCriticalTolerance && sc < 1.0 - kCriticalTolerance;
}

bool ModelParams::theorem_range() const noexcept {
  if (b_ <= 0.0) return false;
  if (dimension_ >= 3 && b_ >= 4.0 / dimension_) return false;
  return true;
}

Regime ModelParams::regime() const noexcept {
  if (!intercritical() || !theorem_range()) return Regime::out_of_theorem;
  return alpha() <= 1.0 + kCriticalTolerance ? Regime::case1_finite : Regime::case2_rate;
}

void ModelParams::require_energy_subcritical() const {
  if (!energy_subcritical()) {
    std::ostringstream os;
    os << "p must lie below the Sobolev exponent 2* = " << sobolev_exponent()
       << " (no H^1 ground state at or above it); got " << describe();
    throw ValidationError(os.str());
  }
}

void ModelParams::require_intercritical() const {
  if (!intercritical()) {
    throw ValidationError("parameters are not intercritical (0 < s_c < 1): " + describe());
  }
}

std::string ModelParams::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "(N=" << dimension_ << ", b=" << b_ << ", p=" << p_ << ")";
  return os.str();
}

}  // namespace inls
