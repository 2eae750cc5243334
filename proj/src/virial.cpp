#include "inls/virial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "inls/error.hpp"
#include "inls/functionals.hpp"
#include "inls/radial_ops.hpp"

namespace inls {

// Blend profile psi(s), s = (r - R) / R in [0, end]; zero beyond end.
struct CutoffProfile::Shape {
  virtual ~Shape() = default;
  virtual CutoffDerivatives eval(double s) const = 0;
  CutoffConstruction kind;
  double end = 0.0;
  double gain = 1.0;  // multiplies the whole profile, r^2 core included
  std::vector<double> knots;  // in s, including 0 and end
};

namespace {

// Degree-9 two-point Hermite blend: psi matches 1 + 2s + s^2 at s = 0 and
// vanishes at s = 1, both through the fourth derivative. Writing
// psi = (1 - s)^5 q(s), q is the degree-4 Taylor polynomial of
// (1 + s)^2 (1 - s)^{-5}.
struct PolyBlend final : CutoffProfile::Shape {
  std::array<double, 10> c{};

  PolyBlend() {
    kind = CutoffConstruction::poly_blend;
    end = 1.0;
    knots = {0.0, 1.0};
    const std::array<double, 5> q{1.0, 7.0, 26.0, 70.0, 155.0};
    const std::array<double, 6> a{1.0, -5.0, 10.0, -10.0, 5.0, -1.0};  // (1 - s)^5
    for (std::size_t i = 0; i < q.size(); ++i) {
      for (std::size_t k = 0; k < a.size(); ++k) c[i + k] += q[i] * a[k];
    }
  }

  CutoffDerivatives eval(double s) const override {
    // Horner with Taylor coefficients: d[k] ends as psi^{(k)}(s) / k!.
    double d[5] = {0, 0, 0, 0, 0};
    for (std::size_t i = c.size(); i-- > 0;) {
      for (int k = 4; k > 0; --k) d[k] = d[k] * s + d[k - 1];
      d[0] = d[0] * s + c[i];
    }
    return {d[0], d[1], 2.0 * d[2], 6.0 * d[3], 24.0 * d[4]};
  }
};

// Clamped quintic smoothstep S(x) = 10x^3 - 15x^4 + 6x^5 and what the ramp
// needs: two antiderivatives and two derivatives.
struct Smooth {
  double s2, s1, s0, ds, dds;
};

Smooth smoothstep(double x) {
  if (x <= 0.0) return {0, 0, 0, 0, 0};
  if (x >= 1.0) {
    const double y = x - 1.0;
    return {1.0 / 7.0 + 0.5 * y + 0.5 * y * y, 0.5 + y, 1.0, 0.0, 0.0};
  }
  const double x2 = x * x, x3 = x2 * x, x4 = x3 * x;
  return {0.5 * x4 * x - 0.5 * x4 * x2 + x4 * x3 / 7.0, 2.5 * x4 - 3.0 * x4 * x + x4 * x2,
          10.0 * x3 - 15.0 * x4 + 6.0 * x4 * x, 30.0 * x2 - 60.0 * x3 + 30.0 * x4,
          60.0 * x - 180.0 * x2 + 120.0 * x3};
}

// psi'' = 2 + sum_k h_k S((s - a_k) / w_k). The heights carry two unknowns,
// h_k = c_k + alpha_k A + beta_k B, fixed by psi'(end) = psi(end) = 0.
// psi''(end) = 0 holds when the c_k sum to -2 and the alpha_k, beta_k to 0.
struct Ramp final : CutoffProfile::Shape {
  struct Step {
    double a, w, c, alpha, beta;
  };
  std::vector<Step> steps;
  std::vector<double> h;

  Ramp(CutoffConstruction k, std::vector<Step> st, double g = 1.0) : steps(std::move(st)) {
    kind = k;
    gain = g;
    for (const auto& s : steps) end = std::max(end, s.a + s.w);
    knots.push_back(0.0);
    for (const auto& s : steps) {
      knots.push_back(s.a);
      knots.push_back(s.a + s.w);
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    // Linear system for (A, B): row 0 psi'(end), row 1 psi(end).
    double m[2][3] = {{0, 0, -(2.0 + 2.0 * end)}, {0, 0, -(1.0 + 2.0 * end + end * end)}};
    for (const auto& s : steps) {
      const Smooth g = smoothstep((end - s.a) / s.w);
      const double f1 = s.w * g.s1, f0 = s.w * s.w * g.s2;
      m[0][0] += s.alpha * f1;
      m[0][1] += s.beta * f1;
      m[0][2] -= s.c * f1;
      m[1][0] += s.alpha * f0;
      m[1][1] += s.beta * f0;
      m[1][2] -= s.c * f0;
    }
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const double A = (m[0][2] * m[1][1] - m[0][1] * m[1][2]) / det;
    const double B = (m[0][0] * m[1][2] - m[0][2] * m[1][0]) / det;
    for (const auto& s : steps) h.push_back(s.c + s.alpha * A + s.beta * B);
  }

  CutoffDerivatives eval(double s) const override {
    if (s >= end) return {};
    CutoffDerivatives d{1.0 + 2.0 * s + s * s, 2.0 + 2.0 * s, 2.0, 0.0, 0.0};
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const double w = steps[k].w;
      const Smooth g = smoothstep((s - steps[k].a) / w);
      d.v += h[k] * w * w * g.s2;
      d.d1 += h[k] * w * g.s1;
      d.d2 += h[k] * g.s0;
      d.d3 += h[k] / w * g.ds;
      d.d4 += h[k] / (w * w) * g.dds;
    }
    return d;
  }
};

std::shared_ptr<const CutoffProfile::Shape> shape_for(CutoffConstruction c) {
  // Shapes are R independent; build each once.
  static const auto poly = std::make_shared<const PolyBlend>();
  // psi'' steps down from 2 to -A over [0, 3], up to B over [3, 6] and back
  // to 0 over [6, 8]: support [0, 9R], max psi'''' about 3.4.
  static const auto ramp = std::make_shared<const Ramp>(
      CutoffConstruction::mollified_ramp,
      std::vector<Ramp::Step>{{0, 3, -2, -1, 0}, {3, 3, 0, 1, 1}, {6, 2, 0, 0, -1}});
  // 1.5 times the ramp: phi'' = 3 on the core and phi > r^2.
  static const auto bad = std::make_shared<const Ramp>(
      CutoffConstruction::corrupted,
      std::vector<Ramp::Step>{{0, 3, -2, -1, 0}, {3, 3, 0, 1, 1}, {6, 2, 0, 0, -1}}, 1.5);
  switch (c) {
    case CutoffConstruction::poly_blend: return poly;
    case CutoffConstruction::mollified_ramp: return ramp;
    case CutoffConstruction::corrupted: return bad;
  }
  throw ValidationError("unknown cutoff construction");
}

}  // namespace

std::string to_string(CutoffConstruction c) {
  switch (c) {
    case CutoffConstruction::poly_blend: return "poly_blend";
    case CutoffConstruction::mollified_ramp: return "mollified_ramp";
    case CutoffConstruction::corrupted: return "corrupted";
  }
  return "unknown";
}

CutoffConstruction CutoffProfile::construction() const noexcept { return shape_->kind; }

double CutoffProfile::support_end() const noexcept { return R_ * (1.0 + shape_->end); }

CutoffDerivatives CutoffProfile::eval(double r) const {
  const double g = shape_->gain;
  if (r <= R_) return {g * r * r, g * 2.0 * r, g * 2.0, 0.0, 0.0};
  const double s = (r - R_) / R_;
  if (s >= shape_->end) return {};
  const CutoffDerivatives d = shape_->eval(s);
  return {g * R_ * R_ * d.v, g * R_ * d.d1, g * d.d2, g * d.d3 / R_, g * d.d4 / (R_ * R_)};
}

double CutoffProfile::bilaplacian(double r, int n) const {
  if (r <= R_) return 0.0;  // Delta^2 r^2 = 0
  const CutoffDerivatives d = eval(r);
  const double m = n - 1.0;
  return d.d4 + 2.0 * m * d.d3 / r + m * (n - 3.0) * (d.d2 / (r * r) - d.d1 / (r * r * r));
}

CutoffProfile CutoffProfile::rescaled(double R) const {
  if (!(R > 0.0) || !std::isfinite(R)) throw ValidationError("cutoff radius must be positive");
  return CutoffProfile(shape_, R);
}

std::vector<double> CutoffProfile::knots() const {
  std::vector<double> k;
  for (double s : shape_->knots) k.push_back(R_ * (1.0 + s));
  return k;
}

CutoffProfile make_cutoff(CutoffConstruction construction, double R) {
  if (!(R > 0.0) || !std::isfinite(R)) throw ValidationError("cutoff radius must be positive");
  return CutoffProfile(shape_for(construction), R);
}

CutoffCertificate certify_cutoff(const CutoffProfile& phi, std::size_t samples, double tolerance) {
  CutoffCertificate c;
  const double R = phi.R();
  const double d4_bound = 4.0 / (R * R);
  c.min_phi = std::numeric_limits<double>::infinity();
  c.max_phi_minus_r2 = c.max_d2 = c.max_d4_excess = -std::numeric_limits<double>::infinity();

  auto check = [&](double r) {
    const CutoffDerivatives d = phi.eval(r);
    c.min_phi = std::min(c.min_phi, d.v);
    c.max_phi_minus_r2 = std::max(c.max_phi_minus_r2, d.v - r * r);
    c.max_d2 = std::max(c.max_d2, d.d2);
    c.max_d4_excess = std::max(c.max_d4_excess, d.d4 - d4_bound);
    ++c.samples;
  };
  const double top = 1.1 * phi.support_end();
  const std::size_t n = std::max<std::size_t>(samples, 2);
  for (std::size_t i = 0; i < n; ++i) check(top * static_cast<double>(i) / static_cast<double>(n - 1));

  // Jumps of phi^{(k)} across each knot, normalized by R^{2-k}.
  for (double k : phi.knots()) {
    check(k);
    const double eps = 1e-10 * R;
    const CutoffDerivatives lo = phi.eval(k - eps), hi = phi.eval(k + eps);
    const double jumps[5] = {(hi.v - lo.v) / (R * R), (hi.d1 - lo.d1) / R, hi.d2 - lo.d2,
                             (hi.d3 - lo.d3) * R, (hi.d4 - lo.d4) * R * R};
    for (double j : jumps) c.max_jump = std::max(c.max_jump, std::abs(j));
  }

  if (c.min_phi < -tolerance) {
    c.failure = "phi >= 0 violated";
  } else if (c.max_phi_minus_r2 > tolerance) {
    c.failure = "phi <= r^2 violated";
  } else if (c.max_d2 > 2.0 + tolerance) {
    c.failure = "phi'' <= 2 violated";
  } else if (c.max_d4_excess > tolerance) {
    c.failure = "phi'''' <= 4/R^2 violated";
  } else if (!(c.max_jump < 1e-8)) {
    c.failure = "phi is not C^4 across a knot";
  }
  c.admissible = c.failure.empty();
  return c;
}

CutoffProfile build_cutoff(double R) {
  for (auto kind : {CutoffConstruction::poly_blend, CutoffConstruction::mollified_ramp}) {
    auto phi = make_cutoff(kind, R);
    if (certify_cutoff(phi).admissible) return phi;
  }
  throw VerificationError("no cutoff construction certified for R = " + std::to_string(R));
}

void require_cutoff_fits(const RadialGrid& grid, const CutoffProfile& phi) {
  if (grid.r_max() <= phi.R() || phi.support_end() <= grid.r_max()) return;
  throw ValidationError("cutoff support [0, " + std::to_string(phi.support_end()) +
                        "] is cut by the grid edge r_max = " + std::to_string(grid.r_max()));
}

namespace {

struct FaceData {
  std::vector<Complex> d;  // (u_{f+1} - u_f) / dr
  std::vector<Complex> avg;
};

}  // namespace

double local_virial_I(const FieldState& u, const CutoffProfile& phi) {
  u.require_finite();
  require_cutoff_fits(u.grid(), phi);
  const auto r = u.grid().nodes();
  const auto w = u.grid().weights();
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += w[j] * phi.phi(r[j]) * std::norm(u[j]);
  return s;
}

double local_virial_Iprime(const FieldState& u, const CutoffProfile& phi) {
  u.require_finite();
  require_cutoff_fits(u.grid(), phi);
  const auto d = face_derivative(u);
  const auto a = face_average(u);
  const auto rf = u.grid().faces();
  const auto W = u.grid().face_weights();
  double s = 0.0;
  for (std::size_t f = 0; f < d.size(); ++f) s += W[f] * phi.d1(rf[f]) * (d[f] * std::conj(a[f])).imag();
  return 2.0 * s;
}

namespace {

// The four terms of I'' and the pieces of the decomposition from one pass.
struct VirialTerms {
  double gradient = 0.0;   // 4 int (phi'/r) |u_r|^2 + 4 int (phi'' - phi'/r) |u_r|^2
  double potential = 0.0;  // -(2(p-1)/(p+1)) int [phi'' + (N-1+2b/(p-1)) phi'/r] r^{-b}|u|^{p+1}
  double bilap = 0.0;      // -int Delta^2 phi |u|^2
  double R1 = 0.0, R2 = 0.0;
};

VirialTerms virial_terms(const FieldState& u, const CutoffProfile& phi, const ModelParams& params) {
  u.require_finite();
  require_cutoff_fits(u.grid(), phi);
  const auto& g = u.grid();
  const int n = params.dimension();
  const double p = params.p(), b = params.b();
  const double lead = -2.0 * (p - 1.0) / (p + 1.0);
  const double mix = n - 1.0 + 2.0 * b / (p - 1.0);

  VirialTerms t;
  const auto d = face_derivative(u);
  const auto rf = g.faces();
  const auto W = g.face_weights();
  for (std::size_t f = 0; f < d.size(); ++f) {
    const CutoffDerivatives c = phi.eval(rf[f]);
    const double q = 4.0 * W[f] * std::norm(d[f]);
    const double a = c.d1 / rf[f];
    // |x . grad u|^2 (phi''/r^2 - phi'/r^3) = (phi'' - phi'/r) |u_r|^2
    t.gradient += q * a + q * (c.d2 - a);
    t.R1 += q * ((a - 2.0) + (c.d2 - a));
  }

  const auto dens = potential_density(u, params);
  const auto r = g.nodes();
  const auto w = g.weights();
  for (std::size_t j = 0; j < u.size(); ++j) {
    const CutoffDerivatives c = phi.eval(r[j]);
    const double a = c.d1 / r[j];
    t.potential += lead * w[j] * (c.d2 + mix * a) * dens[j];
    // Grouped so that the bracket is exactly 0 where phi = r^2.
    t.R2 += lead * w[j] * ((c.d2 - 2.0) + mix * (a - 2.0)) * dens[j];
    t.bilap -= w[j] * phi.bilaplacian(r[j], n) * std::norm(u[j]);
  }
  return t;
}

}  // namespace

double local_virial_Idoubleprime_direct(const FieldState& u, const CutoffProfile& phi,
                                        const ModelParams& params) {
  const VirialTerms t = virial_terms(u, phi, params);
  return t.gradient + t.potential + t.bilap;
}

double VirialReport::relative_residual() const {
  return std::abs(decomposition_residual) /
         (std::abs(I_doubleprime_direct) + 8.0 * std::abs(K) + 1e-30);
}

VirialReport decompose_remainders(const FieldState& u, const CutoffProfile& phi,
                                  const ModelParams& params) {
  if (u.grid().dimension() != params.dimension()) {
    throw ValidationError("field dimension does not match N");
  }
  const VirialTerms t = virial_terms(u, phi, params);
  const FieldSummary s = summarize(u, params);
  VirialReport v;
  v.I = local_virial_I(u, phi);
  v.I_prime = local_virial_Iprime(u, phi);
  v.I_doubleprime_direct = t.gradient + t.potential + t.bilap;
  v.K = s.k;
  v.R1 = t.R1;
  v.R2 = t.R2;
  v.R3 = t.bilap;
  v.decomposition_residual = v.I_doubleprime_direct - (8.0 * v.K + v.R1 + v.R2 + v.R3);
  v.gradient_norm_sq = s.gradient_norm_sq;
  v.delta_instant = s.gradient_norm_sq > 0.0 ? -s.k / s.gradient_norm_sq : 0.0;
  return v;
}

RemainderBounds remainder_bounds_check(const FieldState& u, const CutoffProfile& phi,
                                       const ModelParams& params) {
  const double R = phi.R();
  const FieldSummary s = summarize(u, params);
  const double alpha = params.alpha();
  RemainderBounds b;
  b.exterior_potential = exterior_potential(u, params, R);
  b.gn_comparison = std::pow(R, -params.b()) * std::pow(s.gradient_norm_sq, alpha) *
                    std::pow(s.mass, 0.5 * (params.p() + 1.0 - 2.0 * alpha));
  b.gn_ratio = b.gn_comparison > 0.0 ? b.exterior_potential / b.gn_comparison : 0.0;
  b.r3_abs = std::abs(virial_terms(u, phi, params).bilap);
  b.r3_comparison = s.mass / (R * R);
  b.r3_ratio = b.r3_comparison > 0.0 ? b.r3_abs / b.r3_comparison : 0.0;
  return b;
}

std::string to_string(CutoffMode m) {
  return m == CutoffMode::fixed_R ? "fixed_R" : "adaptive_RT";
}

CutoffMode parse_cutoff_mode(const std::string& s) {
  if (s == "fixed_R") return CutoffMode::fixed_R;
  if (s == "adaptive_RT") return CutoffMode::adaptive_RT;
  throw ValidationError("unknown cutoff mode '" + s + "' (fixed_R, adaptive_RT)");
}

double adaptive_radius(double sup_grad, const ModelParams& params) {
  const auto e = params.rate_exponent();
  if (!e || params.b() <= 0.0) {
    throw ValidationError("adaptive cutoff radius needs alpha > 1 and b > 0");
  }
  // R = sup^{(2 alpha - 2) / b} = sup^{1 / rate_exponent}
  return std::pow(sup_grad, 1.0 / *e);
}

Recorder make_virial_recorder(const ModelParams& params, const RadialGrid& grid, CutoffMode mode,
                              double fixed_R) {
  if (mode == CutoffMode::fixed_R) {
    const CutoffProfile phi = build_cutoff(fixed_R);
    require_cutoff_fits(grid, phi);
    return [params, phi](const FieldState& u) {
      TimeSeriesRecord rec = basic_record(u, params);
      const VirialReport v = decompose_remainders(u, phi, params);
      rec.I = v.I;
      rec.Iprime = v.I_prime;
      rec.Idoubleprime = v.I_doubleprime_direct;
      rec.R1 = v.R1;
      rec.R2 = v.R2;
      rec.R3 = v.R3;
      rec.R_cutoff = phi.R();
      return rec;
    };
  }
  adaptive_radius(1.0, params);  // validates the regime up front
  const CutoffProfile base = build_cutoff(1.0);
  const double r_max = grid.r_max();
  auto sup = std::make_shared<double>(0.0);
  return [params, base, r_max, sup](const FieldState& u) {
    TimeSeriesRecord rec = basic_record(u, params);
    *sup = std::max(*sup, std::sqrt(rec.grad_norm_sq));
    double R = adaptive_radius(*sup, params);
    if (!(R > 0.0)) R = r_max;
    CutoffProfile phi = base.rescaled(R);
    if (R < r_max && phi.support_end() > r_max) phi = base.rescaled(r_max);
    const VirialReport v = decompose_remainders(u, phi, params);
    rec.I = v.I;
    rec.Iprime = v.I_prime;
    rec.Idoubleprime = v.I_doubleprime_direct;
    rec.R1 = v.R1;
    rec.R2 = v.R2;
    rec.R3 = v.R3;
    rec.R_cutoff = phi.R();
    return rec;
  };
}

}  // namespace inls
