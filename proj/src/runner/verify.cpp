#include <algorithm>
#include <cstdio>
#include <cmath>
#include <random>

#include "inls/error.hpp"
#include "inls/functionals.hpp"
#include "inls/runner.hpp"
#include "inls/virial.hpp"

namespace inls {

namespace {

// Three Gaussian bumps with complex amplitudes times a chirp; negligible
// beyond r = 10.
FieldState gaussian_field(GridPtr grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-2.0, 2.0), center(0.0, 4.0), width(0.3, 1.5),
      chirp(-3.0, 3.0);
  Complex a[3];
  double c[3], w[3];
  for (int i = 0; i < 3; ++i) {
    const double re = amp(rng), im = amp(rng);
    a[i] = {re, im};
    c[i] = center(rng);
    w[i] = width(rng);
  }
  const double k = chirp(rng);
  return FieldState::from_function(grid, [&](double r) {
    Complex s = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double x = (r - c[i]) / w[i];
      s += a[i] * std::exp(-x * x);
    }
    return s * std::polar(1.0, k * r);
  });
}

std::string tag(const std::string& name, double R) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "[R=%g]", R);
  return name + buf;
}

}  // namespace

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed; });
}

nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json j;
  j["all_passed"] = r.all_passed();
  j["exit_code"] = r.exit_code();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"passed", c.passed},
                           {"measured", std::isfinite(c.measured) ? nlohmann::json(c.measured)
                                                                  : nlohmann::json(nullptr)},
                           {"tolerance", c.tolerance},
                           {"detail", c.detail}});
  }
  return j;
}

VerificationReport verify_identities(const RunConfig& config) {
  config.validate();
  const auto& v = config.verification;
  const ModelParams& params = config.model;
  VerificationReport rep;
  if (v.radii.empty()) return rep;

  // One grid holding the whole support of the largest cutoff, at least as
  // fine as the run grid.
  const double R_top = *std::max_element(v.radii.begin(), v.radii.end());
  const double r_max = std::max(config.r_max, 10.0 * R_top);
  const double dr = config.r_max / static_cast<double>(config.cells);
  const auto cells = std::max<std::size_t>(config.cells, static_cast<std::size_t>(std::ceil(r_max / dr)));
  const auto grid = RadialGrid::make(params.dimension(), r_max, cells);

  std::mt19937_64 rng(v.seed);
  std::vector<FieldState> fields;
  const int count = v.zero_field ? 1 : v.fields;
  for (int i = 0; i < count; ++i) {
    fields.push_back(v.zero_field ? FieldState::zeros(grid) : gaussian_field(grid, rng));
  }

  auto add = [&](std::string name, bool passed, double measured, double tolerance, std::string detail = {}) {
    rep.checks.push_back({std::move(name), passed, measured, tolerance, std::move(detail)});
  };

  for (double R : v.radii) {
    const CutoffProfile phi = v.corrupted_cutoff ? make_cutoff(CutoffConstruction::corrupted, R)
                                                 : build_cutoff(R);
    const CutoffCertificate cert = certify_cutoff(phi);
    const double worst = std::max({-cert.min_phi, cert.max_phi_minus_r2, cert.max_d2 - 2.0,
                                   cert.max_d4_excess});
    char jump[64];
    std::snprintf(jump, sizeof jump, ", max knot jump %.3g", cert.max_jump);
    add(tag("cutoff_admissible", R), cert.admissible, worst, 1e-9,
        to_string(phi.construction()) + jump + (cert.failure.empty() ? "" : ": " + cert.failure));

    double residual = 0.0, r1 = -std::numeric_limits<double>::infinity();
    double min_I = std::numeric_limits<double>::infinity();
    for (const auto& u : fields) {
      const VirialReport vr = decompose_remainders(u, phi, params);
      residual = std::max(residual, vr.relative_residual());
      r1 = std::max(r1, vr.R1);
      const double scale = second_moment(u);
      min_I = std::min(min_I, scale > 0.0 ? vr.I / scale : vr.I);
    }
    add(tag("decomposition_residual", R), residual < v.residual_tolerance, residual,
        v.residual_tolerance, "max over fields of |I'' - (8K + R1 + R2 + R3)| / (|I''| + 8|K|)");
    add(tag("R1_nonpositive", R), r1 <= v.r1_tolerance, r1, v.r1_tolerance, "max R1 over fields");
    add(tag("I_nonnegative", R), min_I >= -1e-12, min_I, 1e-12, "min I / int r^2 |u|^2");

    // Two fixed steps from the first field; centered differences at the
    // middle sample against the recorded derivatives.
    const double h = v.fd_dt;
    FieldState u = fields.front();
    Stepper stepper(params, grid);
    std::vector<VirialReport> rec{decompose_remainders(u, phi, params)};
    for (int k = 0; k < 2; ++k) {
      stepper.advance(u, h);
      rec.push_back(decompose_remainders(u, phi, params));
    }
    const double g = rec[1].gradient_norm_sq, m = mass(u);
    const double fd1 = (rec[2].I - rec[0].I) / (2 * h);
    const double fd2 = (rec[2].I_prime - rec[0].I_prime) / (2 * h);
    const double e1 = std::abs(fd1 - rec[1].I_prime) / (std::abs(rec[1].I_prime) + R * std::sqrt(g * m) + 1e-300);
    const double e2 = std::abs(fd2 - rec[1].I_doubleprime_direct) /
                      (std::abs(rec[1].I_doubleprime_direct) + 8 * std::abs(rec[1].K) + 1e-300);
    add(tag("fd_Iprime", R), e1 < v.fd_tolerance, e1, v.fd_tolerance,
        "centered difference of I vs I', normalized by |I'| + R ||grad u|| ||u||");
    add(tag("fd_Idoubleprime", R), e2 < v.fd_tolerance, e2, v.fd_tolerance,
        "centered difference of I' vs I'', normalized by |I''| + 8|K|");
  }

  // phi = r^2 on the whole grid: I'' = 8K with no remainders.
  const CutoffProfile global = build_cutoff(r_max);
  double global_res = 0.0;
  for (const auto& u : fields) {
    const VirialReport vr = decompose_remainders(u, global, params);
    global_res = std::max(global_res, std::abs(vr.I_doubleprime_direct - 8 * vr.K) /
                                          (std::abs(vr.I_doubleprime_direct) + 8 * std::abs(vr.K) + 1e-30));
  }
  add("global_virial", global_res < v.residual_tolerance, global_res, v.residual_tolerance,
      "phi = r^2 on the grid: |I'' - 8K| / (|I''| + 8|K|)");
  return rep;
}

}  // namespace inls
