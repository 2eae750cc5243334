#include <doctest.h>

#include <cmath>

#include "inls/dichotomy.hpp"
#include "inls/error.hpp"
#include "inls/functionals.hpp"
#include "inls/virial.hpp"

using namespace inls;

namespace {

GroundState solve(const ModelParams& mp, double r_max = 20.0, std::size_t m = 4096) {
  return solve_ground_state(mp, RadialGrid::make(mp.dimension(), r_max, m));
}

std::vector<TimeSeriesRecord> synthetic(int n, double t1, auto grad, auto iprime) {
  std::vector<TimeSeriesRecord> s;
  for (int k = 0; k < n; ++k) {
    TimeSeriesRecord r;
    r.t = t1 * k / (n - 1);
    const double g = grad(r.t);
    r.grad_norm_sq = g * g;
    r.mass = 1.0;
    r.Iprime = iprime(r.t);
    r.I = -r.t;
    r.R_cutoff = 1.0;
    s.push_back(r);
  }
  return s;
}

}  // namespace

TEST_CASE("criticality formulas") {
  auto c = compute_criticality(ModelParams(3, 0.5, 3.0));
  CHECK(c.s_c == doctest::Approx(0.75));
  CHECK(c.alpha == doctest::Approx(1.5));
  REQUIRE(c.rate_exponent.has_value());
  CHECK(*c.rate_exponent == doctest::Approx(0.5));
  CHECK(c.regime == Regime::case2_rate);

  c = compute_criticality(ModelParams(2, 1.0, 2.0));
  CHECK(c.s_c == doctest::Approx(0.0));
  CHECK(c.regime == Regime::out_of_theorem);

  c = compute_criticality(ModelParams(3, 1.0, 7.0 / 3.0));
  CHECK(c.alpha == doctest::Approx(1.0));
  CHECK(c.s_c == doctest::Approx(0.75));
  CHECK(c.s_c == doctest::Approx(3 * 1.0 / 4));
  CHECK_FALSE(c.rate_exponent.has_value());
  CHECK(c.regime == Regime::case1_finite);

  // Energy-critical: outside 0 < s_c < 1.
  CHECK(compute_criticality(ModelParams(3, 1.0, 3.0)).regime == Regime::out_of_theorem);
}

TEST_CASE("ground state saturates both thresholds") {
  const ModelParams mp(3, 0.5, 3.0);
  const auto gs = solve(mp);
  const auto v = classify(gs.profile, mp, gs);
  CHECK(std::abs(v.margin_EM) <= 1e-6 * v.threshold_EM);
  CHECK(std::abs(v.margin_GM) <= 1e-6 * v.threshold_GM);
  CHECK_FALSE(v.cond_EM_satisfied);
  CHECK_FALSE(v.cond_GM_satisfied);
  CHECK(v.predicted == Prediction::no_prediction);
}

TEST_CASE("multiples of Q above the threshold") {
  SUBCASE("case 2, 1.1 Q at (3, 0.5, 3)") {
    const ModelParams mp(3, 0.5, 3.0);
    const auto gs = solve(mp);
    const auto v = classify(gs.profile.scaled(1.1), mp, gs);
    CHECK(v.cond_GM_satisfied);
    CHECK(v.cond_EM_satisfied);
    CHECK_FALSE(v.negative_energy_shortcut);
    CHECK(v.predicted == Prediction::finite_or_infinite_blowup_with_rate);
    CHECK(std::abs(v.margin_GM - 0.1 * v.threshold_GM) <= 1e-10 * v.threshold_GM);
  }
  SUBCASE("case 1, 1.2 Q at (3, 1, 7/3)") {
    const ModelParams mp(3, 1.0, 7.0 / 3.0);
    const auto gs = solve(mp);
    const auto v = classify(gs.profile.scaled(1.2), mp, gs);
    CHECK(v.cond_GM_satisfied);
    CHECK(v.cond_EM_satisfied);
    CHECK(v.predicted == Prediction::finite_time_blowup);
    CHECK(std::abs(v.margin_GM - 0.2 * v.threshold_GM) <= 1e-10 * v.threshold_GM);
  }
  SUBCASE("below the threshold") {
    const ModelParams mp(3, 0.5, 3.0);
    const auto gs = solve(mp);
    const auto v = classify(gs.profile.scaled(0.9), mp, gs);
    CHECK_FALSE(v.cond_GM_satisfied);
    CHECK(v.predicted == Prediction::no_prediction);
  }
  SUBCASE("large multiple: negative energy shortcut") {
    const ModelParams mp(3, 0.5, 3.0);
    const auto gs = solve(mp);
    const auto v = classify(gs.profile.scaled(3.0), mp, gs);
    CHECK(v.negative_energy_shortcut);
    CHECK(v.value_EM < 0.0);
    CHECK(v.cond_EM_satisfied);
  }
}

TEST_CASE("classification rejects a mismatched ground state") {
  const ModelParams mp(3, 0.5, 3.0);
  const auto gs = solve(mp, 20.0, 1024);
  CHECK_THROWS_AS(classify(gs.profile, ModelParams(3, 0.5, 2.9), gs), ValidationError);
  const auto u2 = FieldState::zeros(RadialGrid::make(2, 20.0, 1024));
  CHECK_THROWS_AS(classify(u2, mp, gs), ValidationError);
}

TEST_CASE("verdict is invariant under the scaling symmetry") {
  const ModelParams mp(3, 0.5, 3.0);
  const auto gs = solve(mp, 40.0, 8192);
  for (double c : {0.95, 1.1}) {
    const auto u = gs.profile.scaled(c);
    const auto v0 = classify(u, mp, gs);
    const auto v1 = classify(apply_scaling(u, mp, 2.0), mp, gs);
    CAPTURE(c);
    CHECK(v1.value_EM == doctest::Approx(v0.value_EM).epsilon(1e-3));
    CHECK(v1.value_GM == doctest::Approx(v0.value_GM).epsilon(1e-3));
    CHECK(v1.cond_EM_satisfied == v0.cond_EM_satisfied);
    CHECK(v1.cond_GM_satisfied == v0.cond_GM_satisfied);
    CHECK(v1.predicted == v0.predicted);
  }
}

TEST_CASE("ODE mechanism on synthetic series") {
  const double g = 1.7;
  auto s = synthetic(21, 2.0, [g](double) { return g; }, [](double) { return -1.0; });
  auto c = ode_mechanism_check(s);
  REQUIRE(c.T0.has_value());
  CHECK(*c.T0 == 0.0);
  for (std::size_t k = 0; k < c.f_series.size(); ++k) {
    CHECK(c.f_series[k] == doctest::Approx(g * g * c.times[k]).epsilon(1e-14));
  }
  CHECK(c.monotone);
  CHECK(c.ode_constant == doctest::Approx(std::pow(g * g * 2.0, 2) / (g * g)));

  s = synthetic(21, 2.0, [](double) { return 1.0; }, [](double) { return 1.0; });
  c = ode_mechanism_check(s);
  CHECK_FALSE(c.T0.has_value());
  CHECK_FALSE(c.monotone);

  // Sign change at t = 1; a sub-noise positive flicker afterwards is ignored.
  s = synthetic(21, 2.0, [](double) { return 1.0; }, [](double t) { return t < 0.95 ? 1.0 : -1.0; });
  s[15].Iprime = 1e-12;
  c = ode_mechanism_check(s);
  REQUIRE(c.T0.has_value());
  CHECK(*c.T0 == doctest::Approx(1.0));

  CHECK_THROWS_AS(ode_mechanism_check(synthetic(9, 1.0, [](double) { return 1.0; },
                                                [](double) { return -1.0; })),
                  ValidationError);
  s = synthetic(12, 1.0, [](double) { return 1.0; }, [](double) { return -1.0; });
  s[3].Iprime = std::nan("");
  CHECK_THROWS_AS(ode_mechanism_check(s), ValidationError);
}

TEST_CASE("rate fitter on exact power laws") {
  const ModelParams mp(3, 0.5, 3.0);
  const double e = *mp.rate_exponent();
  auto s = synthetic(201, 50.0, [e](double t) { return std::pow(t, e); }, [](double) { return -1.0; });
  auto r = rate_report(s, mp);
  CHECK(std::abs(r.fitted_exponent - e) < 1e-3);
  CHECK(std::abs(r.min_ratio - 1.0) < 1e-3);
  for (std::size_t k = 1; k < r.R_of_T.size(); ++k) {
    CHECK(r.R_of_T[k] >= r.R_of_T[k - 1]);
    CHECK(r.sup_grad[k] >= r.sup_grad[k - 1]);
  }
  CHECK(r.ode.has_value());

  // Constant gradient violates the bound; the report shows it.
  s = synthetic(201, 50.0, [](double) { return 2.0; }, [](double) { return 1.0; });
  r = rate_report(s, mp);
  CHECK(std::abs(r.fitted_exponent) < 1e-12);
  CHECK(r.min_ratio == doctest::Approx(std::pow(2.0, 1 / e) / 50.0));
  s = synthetic(401, 500.0, [](double) { return 2.0; }, [](double) { return 1.0; });
  CHECK(rate_report(s, mp).min_ratio < r.min_ratio);

  CHECK_THROWS_AS(rate_report(s, ModelParams(3, 1.0, 7.0 / 3.0)), ValidationError);
  CHECK_THROWS_AS(rate_report(s, ModelParams(3, 0.0, 3.0)), ValidationError);
}

TEST_CASE("blow-up run: ODE mechanism and realized rate ratio") {
  const ModelParams mp(3, 1.0, 3.0);
  const auto g = RadialGrid::make(3, 20.0, 2048);
  const auto u0 = FieldState::from_function(g, [](double r) { return Complex(5 * std::exp(-r * r), 0.0); });
  EvolutionConfig cfg;
  cfg.t_final = 1.0;
  cfg.blowup_gradient_factor = 3.0;
  const auto out = evolve(u0, mp, cfg, make_virial_recorder(mp, *g, CutoffMode::fixed_R, 2.0));
  REQUIRE(out.status == RunStatus::blowup_detected);
  const auto c = ode_mechanism_check(out.series);
  CHECK(c.T0.has_value());
  CHECK(c.monotone);
  CHECK(std::isfinite(c.ode_constant));
  CHECK(c.ode_constant > 0.0);
  const auto r = rate_report(out.series, mp);
  MESSAGE("min R(T)/T = " << r.min_ratio << ", fitted exponent " << r.fitted_exponent);
  CHECK(r.min_ratio > 0.0);
}

TEST_CASE("case-1 radius and inequality monitor") {
  const ModelParams mp(3, 1.0, 7.0 / 3.0);  // alpha = 1: R^{-b} <= 4 delta0 / C
  CHECK(case1_radius(0.1, 5.0, mp, 8.0) == doctest::Approx(20.0));
  CHECK_THROWS_AS(case1_radius(0.0, 5.0, mp), ValidationError);

  std::vector<TimeSeriesRecord> s(3);
  for (std::size_t k = 0; k < s.size(); ++k) {
    s[k].grad_norm_sq = 1.0;
    s[k].Idoubleprime = k == 1 ? -0.1 : -1.0;
    s[k].delta_instant = 0.2 + k;
  }
  CHECK(empirical_delta0(s) == doctest::Approx(0.2));
  const auto m = case1_inequality_check(s, 0.2);
  CHECK(m.samples == 3);
  CHECK(m.violations == 1);
  CHECK(m.worst == doctest::Approx((-0.1 + 0.8) / 0.8));
}
