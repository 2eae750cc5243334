#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "inls/evolution.hpp"
#include "inls/field.hpp"
#include "inls/params.hpp"

namespace inls {

enum class CutoffConstruction {
  poly_blend,      // degree-9 Hermite blend of r^2 into 0 on [R, 2R]
  mollified_ramp,  // phi'' lowered by smoothstep ramps, support [0, 9R]
  corrupted,       // negative control, 1.5 x ramp (phi'' = 3 on [0, R]); never certifies
};

std::string to_string(CutoffConstruction c);

struct CutoffDerivatives {
  double v = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0, d4 = 0.0;
};

// Radial cutoff phi(r) = r^2 on [0, R], R^2 psi((r - R) / R) on the blend and
// 0 beyond support_end(). psi does not depend on R, so phi'' = psi'' and
// phi'''' = psi'''' / R^2 for every R.
class CutoffProfile {
 public:
  struct Shape;

  double R() const noexcept { return R_; }
  CutoffConstruction construction() const noexcept;
  double support_end() const noexcept;

  CutoffDerivatives eval(double r) const;
  double phi(double r) const { return eval(r).v; }
  double d1(double r) const { return eval(r).d1; }
  double d2(double r) const { return eval(r).d2; }
  double d4(double r) const { return eval(r).d4; }

  // Radial Delta^2 phi in dimension n:
  //   phi'''' + 2(n-1) phi'''/r + (n-1)(n-3)(phi''/r^2 - phi'/r^3).
  double bilaplacian(double r, int n) const;

  // Same shape at another radius. Admissibility is scale invariant, so a
  // certified profile stays certified.
  CutoffProfile rescaled(double R) const;

  // Knots in r where the piecewise definition changes.
  std::vector<double> knots() const;

 private:
  friend CutoffProfile make_cutoff(CutoffConstruction, double);
  CutoffProfile(std::shared_ptr<const Shape> shape, double R) : shape_(std::move(shape)), R_(R) {}

  std::shared_ptr<const Shape> shape_;
  double R_;
};

// Uncertified construction; tests and the negative control use it directly.
CutoffProfile make_cutoff(CutoffConstruction construction, double R);

struct CutoffCertificate {
  bool admissible = false;
  std::size_t samples = 0;
  double min_phi = 0.0;            // >= -tol
  double max_phi_minus_r2 = 0.0;   // <= tol
  double max_d2 = 0.0;             // <= 2 + tol
  double max_d4_excess = 0.0;      // max(phi'''' - 4/R^2) <= tol
  double max_jump = 0.0;           // derivative jumps across knots, <= 1e-8
  std::string failure;             // first violated constraint
};

// Samples [0, 1.1 support_end] at `samples` points plus every knot.
CutoffCertificate certify_cutoff(const CutoffProfile& phi, std::size_t samples = 100'000,
                                 double tolerance = 1e-9);

// Degree-9 blend if it certifies, otherwise the mollified ramp. Throws
// ValidationError for R <= 0 and VerificationError if nothing certifies.
CutoffProfile build_cutoff(double R);

// The grid must either end inside the r^2 core (r_max <= R) or contain the
// whole support; otherwise ValidationError.
void require_cutoff_fits(const RadialGrid& grid, const CutoffProfile& phi);

// I = int phi |u|^2
double local_virial_I(const FieldState& u, const CutoffProfile& phi);

// I' = 2 Im int phi' u_r conj(u), face based.
double local_virial_Iprime(const FieldState& u, const CutoffProfile& phi);

// Four-term I'' for radial u with |x . grad u|^2 = r^2 |u_r|^2.
double local_virial_Idoubleprime_direct(const FieldState& u, const CutoffProfile& phi,
                                        const ModelParams& params);

struct VirialReport {
  double I = 0.0;
  double I_prime = 0.0;
  double I_doubleprime_direct = 0.0;
  double K = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  double R3 = 0.0;
  double decomposition_residual = 0.0;
  double delta_instant = 0.0;
  double gradient_norm_sq = 0.0;

  // |residual| / (|I''| + 8|K| + 1e-30)
  double relative_residual() const;
};

VirialReport decompose_remainders(const FieldState& u, const CutoffProfile& phi,
                                  const ModelParams& params);

struct RemainderBounds {
  double exterior_potential = 0.0;  // int_{r > R} r^{-b} |u|^{p+1}
  double gn_comparison = 0.0;       // R^{-b} ||grad u||^{2 alpha} ||u||^{p+1-2 alpha}
  double gn_ratio = 0.0;
  double r3_abs = 0.0;
  double r3_comparison = 0.0;       // R^{-2} ||u||^2
  double r3_ratio = 0.0;
};

RemainderBounds remainder_bounds_check(const FieldState& u, const CutoffProfile& phi,
                                       const ModelParams& params);

enum class CutoffMode { fixed_R, adaptive_RT };

std::string to_string(CutoffMode m);
CutoffMode parse_cutoff_mode(const std::string& s);

// R(T) = sup_{t <= T} ||grad u||^{(2 alpha - 2) / b}; needs alpha > 1, b > 0.
double adaptive_radius(double sup_grad, const ModelParams& params);

// Recorder filling every TimeSeriesRecord column. In adaptive_RT mode the
// radius follows R(T) from the running gradient supremum; when the support
// would cross r_max the radius is raised to r_max (phi = r^2 on the grid).
// The returned recorder keeps that supremum, so use one per run.
Recorder make_virial_recorder(const ModelParams& params, const RadialGrid& grid, CutoffMode mode,
                              double fixed_R);

}  // namespace inls
