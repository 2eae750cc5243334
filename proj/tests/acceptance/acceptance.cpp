// Acceptance battery: one PASS/FAIL line per criterion, exit status = number
// of failed criteria.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fields.hpp"
#include "inls/config.hpp"
#include "inls/dichotomy.hpp"
#include "inls/error.hpp"
#include "inls/evolution.hpp"
#include "inls/functionals.hpp"
#include "inls/ground_state.hpp"
#include "inls/runner.hpp"
#include "inls/virial.hpp"

using namespace inls;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Line {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

GroundState solve(const ModelParams& mp, double r_max, std::size_t m,
                  GroundStateMethod method = GroundStateMethod::fixed_point_renormalization) {
  GroundStateOptions o;
  o.method = method;
  return solve_ground_state(mp, RadialGrid::make(mp.dimension(), r_max, m), o);
}

FieldState gaussian(GridPtr g, double amplitude) {
  return FieldState::from_function(g, [=](double r) { return Complex(amplitude * std::exp(-r * r), 0.0); });
}

Line c1_soliton() {
  const auto t0 = Clock::now();
  const ModelParams mp(1, 0.0, 3.0);
  const auto gs = solve(mp, 20.0, 4096);
  double linf = 0.0;
  for (std::size_t j = 0; j < gs.profile.size(); ++j) {
    const double r = gs.profile.grid().node(j);
    linf = std::max(linf, std::abs(gs.profile[j].real() - std::sqrt(2.0) / std::cosh(r)));
  }
  const double em = rel(gs.mass_Q, 4.0), ee = rel(gs.energy_Q, -2.0 / 3.0), sec = seconds_since(t0);
  return {linf < 1e-4 && em < 1e-3 && ee < 1e-3 && sec < 30.0,
          fmt("Linf %.2e, M(Q) rel %.2e, E(Q) rel %.2e, %.2f s", linf, em, ee, sec)};
}

Line c2_pohozaev() {
  bool pass = true;
  std::string detail;
  for (const auto& mp : {ModelParams(3, 1.0, 3.0), ModelParams(3, 0.5, 3.0), ModelParams(2, 0.5, 3.0)}) {
    detail += mp.describe() + ": ";
    try {
      const auto a = solve(mp, 20.0, 4096);
      const auto b = solve(mp, 20.0, 4096, GroundStateMethod::shooting);
      const double k = std::abs(a.pohozaev_defect), res = a.residual / std::sqrt(a.mass_Q);
      const double agree = rel(b.mass_Q, a.mass_Q);
      const bool ok = k < 1e-3 && res < 1e-8 && agree < 5e-3;
      pass = pass && ok;
      detail += fmt("|K|/|grad Q|^2 %.1e, residual/|Q| %.1e, methods %.1e %s; ", k, res, agree,
                    ok ? "ok" : "FAIL");
    } catch (const Error& e) {
      pass = false;
      detail += std::string("FAIL (") + e.what() + "); ";
    }
  }
  return {pass, detail};
}

Line c3_conservation() {
  const RunConfig defaults;
  const ModelParams mp(3, 0.5, 3.0);
  const auto g = RadialGrid::make(3, defaults.r_max, defaults.cells);
  const auto u0 = gaussian(g, 1.0);
  EvolutionConfig cfg;
  cfg.t_final = 1.0;
  auto drift = [&](const EvolutionConfig& c, double& dm) {
    const auto out = evolve(u0, mp, c);
    const auto& a = out.series.front();
    const auto& b = out.series.back();
    dm = rel(b.mass, a.mass);
    return out.status == RunStatus::completed_horizon ? rel(b.energy, a.energy) : NAN;
  };
  double dm1 = 0, dm2 = 0;
  const double de1 = drift(cfg, dm1), de2 = drift(cfg.refined(2.0), dm2);
  const double ratio = de1 / de2;
  return {dm1 < 1e-8 && de1 < 1e-4 && ratio >= 3.5,
          fmt("M = %zu: mass %.1e, energy %.2e -> %.2e at dt/2 (ratio %.2f)", defaults.cells, dm1, de1,
              de2, ratio)};
}

Line c4_global_virial() {
  const ModelParams mp(3, 0.5, 3.0);
  const auto g = RadialGrid::make(3, 20.0, 2048);
  EvolutionConfig cfg;
  cfg.t_final = 1.0;
  cfg.adaptive = false;  // uniform samples at the default dt
  const auto out = evolve(gaussian(g, 1.0), mp, cfg, make_virial_recorder(mp, *g, CutoffMode::fixed_R, 20.0));
  const auto& s = out.series;
  const double h = cfg.dt_initial;
  double err = 0.0, scale = 0.0;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double fd = (s[k + 1].I - 2 * s[k].I + s[k - 1].I) / (h * h);
    err = std::max(err, std::abs(fd - 8 * s[k].K));
    scale = std::max(scale, 8 * std::abs(s[k].K));
  }
  const double e = err / scale;
  return {out.status == RunStatus::completed_horizon && e < 1e-2,
          fmt("max |D2 I - 8K| / max |8K| = %.2e over %zu samples (phi = r^2, R = r_max)", e, s.size() - 2)};
}

Line c5_decomposition() {
  const ModelParams mp(3, 0.5, 3.0);
  const auto g = RadialGrid::make(3, 100.0, 4096);
  std::mt19937_64 rng(7);
  std::vector<FieldState> fields;
  for (int i = 0; i < 100; ++i) fields.push_back(testfields::random_smooth(g, rng, 1.0));
  double worst = 0.0, r1 = -INFINITY;
  for (double R : {1.0, 3.0, 10.0}) {
    const auto phi = build_cutoff(R);
    for (const auto& u : fields) {
      const auto v = decompose_remainders(u, phi, mp);
      const double res = std::abs(v.I_doubleprime_direct - (8 * v.K + v.R1 + v.R2 + v.R3)) /
                         (std::abs(v.I_doubleprime_direct) + 8 * std::abs(v.K) + 1e-30);
      worst = std::max(worst, res);
      r1 = std::max(r1, v.R1);
    }
  }
  return {worst < 1e-6 && r1 <= 1e-10, fmt("300 cases: max residual %.2e, max R1 %.2e", worst, r1)};
}

Line c6_cutoff() {
  bool pass = true;
  std::string detail;
  for (double R : {0.5, 1.0, 3.0, 10.0}) {
    const auto phi = build_cutoff(R);
    const double top = 1.1 * phi.support_end();
    const int n = 100000;
    double slack = INFINITY, fd_err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = top * i / (n - 1);
      const auto d = phi.eval(r);
      slack = std::min({slack, d.v, r * r - d.v, 2.0 - d.d2, 4.0 / (R * R) - d.d4});
      // Independent check of the analytic derivatives on a subset.
      if (i % 100 == 50) {
        const double h = 1e-3 * R;
        auto v = [&](double x) { return phi.eval(x).v; };
        const double d2 = (v(r + h) - 2 * v(r) + v(r - h)) / (h * h);
        fd_err = std::max(fd_err, std::abs(d2 - d.d2) / 2.0);
      }
    }
    const bool ok = slack >= -1e-9 && fd_err < 1e-4;
    pass = pass && ok;
    detail += fmt("R=%g slack %.1e; ", R, slack);
  }
  return {pass, detail + fmt("(%s, 1e5 samples each)", to_string(build_cutoff(1.0).construction()).c_str())};
}

struct MonitorResult {
  bool predicted = false;
  bool blowup = false;
  double delta_floor = 0.0;
  std::optional<double> T0;
  double t_end = 0.0;
};

MonitorResult monitors(const ModelParams& mp, double c) {
  MonitorResult m;
  const auto g = RadialGrid::make(3, 20.0, 2048);
  const auto gs = solve_ground_state(mp, g);
  const auto u0 = gs.profile.scaled(c);
  const auto v = classify(u0, mp, gs);
  m.predicted = v.cond_EM_satisfied && v.cond_GM_satisfied;
  EvolutionConfig cfg;
  cfg.t_final = 50.0;
  cfg.blowup_gradient_factor = 3.0;
  const auto out = evolve(u0, mp, cfg, make_virial_recorder(mp, *g, CutoffMode::fixed_R, 2.0));
  m.blowup = out.status == RunStatus::blowup_detected;
  m.t_end = out.t_end;
  m.delta_floor = empirical_delta0(out.series);
  // I' < 0 from some sample on, strictly before the trigger.
  for (std::size_t k = out.series.size(); k-- > 0;) {
    if (!(out.series[k].Iprime < 0.0)) break;
    m.T0 = out.series[k].t;
  }
  return m;
}

Line c7_monitors() {
  std::string detail;
  bool pass = false;
  try {
    const auto m = monitors(ModelParams(3, 1.0, 3.0), 1.1);
    pass = m.predicted && m.blowup && m.delta_floor > 0.0 && m.T0 && *m.T0 < m.t_end;
    detail = fmt("(3,1,3): thresholds met %s, delta floor %.3g, T0 %.3g; ", m.predicted ? "yes" : "no", m.delta_floor,
                 m.T0 ? *m.T0 : NAN);
  } catch (const Error& e) {
    detail = std::string("(3,1,3): ") + e.what() + "; ";
  }
  // Supplementary, not a substitute: same monitors at the intercritical case-2
  // triple (3, 0.5, 3).
  const auto s = monitors(ModelParams(3, 0.5, 3.0), 1.1);
  const bool sup = s.predicted && s.blowup && s.delta_floor > 0.0 && s.T0 && *s.T0 < s.t_end;
  detail += fmt("supplementary (3,0.5,3) 1.1Q: thresholds met %s, blowup at %.4g, delta floor %.3g, I' < 0 from t = "
                "%.3g -> %s",
                s.predicted ? "yes" : "no", s.t_end, s.delta_floor, s.T0 ? *s.T0 : NAN, sup ? "holds" : "fails");
  return {pass, detail};
}

Line c8_case1() {
  const ModelParams mp(3, 1.0, 7.0 / 3.0);
  EvolutionConfig cfg;
  cfg.t_final = 50.0;
  cfg.blowup_gradient_factor = 3.0;
  auto trigger = [&](std::size_t m, const EvolutionConfig& c, RunStatus& st) {
    const auto g = RadialGrid::make(3, 20.0, m);
    const auto gs = solve_ground_state(mp, g);
    const auto out = evolve(gs.profile.scaled(1.2), mp, c);
    st = out.status;
    return out.t_end;
  };
  RunStatus s1, s2;
  const double t1 = trigger(4096, cfg, s1);
  const double t2 = trigger(8192, cfg.refined(2.0), s2);
  const double shift = rel(t2, t1);
  const bool ok = s1 == RunStatus::blowup_detected && s2 == RunStatus::blowup_detected && t1 < 50.0 &&
                  shift < 0.05;
  return {ok, fmt("trigger (factor 3) at %.5g (M=4096) and %.5g (M=8192, dt/2): shift %.2f%%", t1, t2,
                  100 * shift)};
}

Line c9_rate() {
  const ModelParams mp(3, 0.5, 3.0);
  const double e = *mp.rate_exponent();
  std::vector<TimeSeriesRecord> s(201);
  for (std::size_t k = 0; k < s.size(); ++k) {
    s[k].t = 50.0 * k / 200.0;
    s[k].grad_norm_sq = std::pow(s[k].t, 2 * e);
    s[k].Iprime = std::nan("");
  }
  const auto r = rate_report(s, mp);
  const bool synth = std::abs(r.fitted_exponent - e) < 1e-3 && std::abs(r.min_ratio - 1.0) < 1e-3;

  const auto g = RadialGrid::make(3, 20.0, 2048);
  const auto gs = solve_ground_state(mp, g);
  EvolutionConfig cfg;
  cfg.t_final = 50.0;
  cfg.blowup_gradient_factor = 3.0;
  const auto out = evolve(gs.profile.scaled(1.1), mp, cfg, make_virial_recorder(mp, *g, CutoffMode::adaptive_RT, 0.0));
  const auto real = rate_report(out.series, mp);
  const bool ok = synth && out.status == RunStatus::blowup_detected && real.min_ratio > 0.0;
  return {ok, fmt("synthetic: exponent %.6f (want %.6f), min_ratio %.6f; (3,0.5,3) 1.1Q run: %s at %.4g, "
                  "min R(T)/T %.4g",
                  r.fitted_exponent, e, r.min_ratio, to_string(out.status).c_str(), out.t_end, real.min_ratio)};
}

Line c10_scaling() {
  bool pass = true;
  std::string detail;
  for (const auto& mp : {ModelParams(3, 0.5, 3.0), ModelParams(2, 0.5, 3.0), ModelParams(3, 1.0, 7.0 / 3.0)}) {
    const auto g = RadialGrid::make(mp.dimension(), 20.0, 4096);
    const auto u = gaussian(g, 1.0);
    const auto v = apply_scaling(u, mp, 2.0);
    const double sc = mp.critical_regularity();
    const double em = rel(mass(v) / mass(u), std::pow(2.0, -2 * sc));
    const double eg = rel(gradient_norm_sq(v) / gradient_norm_sq(u), std::pow(2.0, 2 - 2 * sc));
    pass = pass && em < 1e-2 && eg < 1e-2;
    detail += mp.describe() + fmt(": mass %.1e, grad %.1e; ", em, eg);
  }
  return {pass, detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int sh(const std::string& cmd) {
  const int st = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

Line c11_determinism(Clock::time_point start) {
  const fs::path dir = fs::temp_directory_path() / ("inls_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "run.yaml") << "model: {N: 3, b: 1, p: 3}\n"
                                     "grid: {r_max: 20, M: 2048}\n"
                                     "initial_data: {kind: gaussian, amplitude: 5}\n"
                                     "evolution: {t_final: 1, blowup_gradient_factor: 3}\n"
                                     "diagnostics: {R: 2, classify: false}\n";
  std::ofstream(dir / "bad.yaml") << "verification: {corrupted_cutoff: true}\n";
  const std::string lab = INLS_LAB_PATH;
  const int e1 = sh(lab + " evolve --quiet --config " + (dir / "run.yaml").string() + " --out " + (dir / "a").string());
  const int e2 = sh(lab + " evolve --quiet --config " + (dir / "run.yaml").string() + " --out " + (dir / "b").string());
  const auto a = slurp(dir / "a" / "run" / "series.csv");
  const bool same = e1 == 0 && e2 == 0 && !a.empty() && a == slurp(dir / "b" / "run" / "series.csv");
  const int stock = sh(lab + " verify-identities --out " + (dir / "v").string());
  const int bad = sh(lab + " verify-identities --config " + (dir / "bad.yaml").string() + " --out " +
                     (dir / "v").string());

  // The default battery: every unit test binary plus this program so far.
  int unit_failures = 0;
  std::istringstream bins(INLS_UNIT_BINARIES);
  for (std::string b; std::getline(bins, b, '|');) unit_failures += sh(b) != 0;
  const double battery = seconds_since(start);
  fs::remove_all(dir);
  const bool ok = same && stock == 0 && bad == 4 && unit_failures == 0 && battery < 600.0;
  return {ok, fmt("series byte-identical %d, verify-identities stock exit %d, corrupted exit %d, unit "
                  "failures %d, battery %.1f s",
                  same, stock, bad, unit_failures, battery)};
}

}  // namespace

int main() {
  const auto start = Clock::now();
  using Fn = Line (*)();
  const std::vector<std::pair<const char*, Fn>> criteria = {
      {"soliton regression", c1_soliton},       {"Pohozaev consistency", c2_pohozaev},
      {"conservation", c3_conservation},        {"global virial identity", c4_global_virial},
      {"decomposition identity", c5_decomposition}, {"cutoff admissibility", c6_cutoff},
      {"dichotomy monitors", c7_monitors},      {"case-1 blow-up", c8_case1},
      {"rate machinery", c9_rate},              {"scaling laws", c10_scaling},
  };
  int failed = 0, index = 0;
  auto print = [&](const char* name, const Line& l) {
    failed += !l.pass;
    std::printf("[%s] %2d %-24s %s\n", l.pass ? "PASS" : "FAIL", ++index, name, l.detail.c_str());
    std::fflush(stdout);
  };
  for (const auto& [name, fn] : criteria) {
    Line l;
    try {
      l = fn();
    } catch (const std::exception& e) {
      l = {false, std::string("error: ") + e.what()};
    }
    print(name, l);
  }
  Line l;
  try {
    l = c11_determinism(start);
  } catch (const std::exception& e) {
    l = {false, std::string("error: ") + e.what()};
  }
  print("determinism & CLI", l);
  std::printf("%d of 11 criteria failed\n", failed);
  return failed;
}
