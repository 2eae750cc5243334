#include "inls/dichotomy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "inls/error.hpp"
#include "inls/functionals.hpp"

namespace inls {

Criticality compute_criticality(const ModelParams& params) {
  return {params.critical_regularity(), params.alpha(), params.rate_exponent(), params.regime()};
}

std::string to_string(Prediction p) {
  switch (p) {
    case Prediction::finite_time_blowup: return "finite_time_blowup";
    case Prediction::finite_or_infinite_blowup_with_rate: return "finite_or_infinite_blowup_with_rate";
    case Prediction::no_prediction: return "no_prediction";
  }
  return "unknown";
}

namespace {

// Same degeneration at s_c = 0 and s_c = 1 as threshold_quantities.
double mix(double a, double b, double sc) {
  if (std::abs(sc) <= kCriticalTolerance) return b;
  if (std::abs(sc - 1.0) <= kCriticalTolerance) return a;
  return std::pow(a, sc) * std::pow(b, 1.0 - sc);
}

}  // namespace

DichotomyVerdict classify(const FieldState& u0, const ModelParams& params, const GroundState& gs) {
  if (!(gs.params == params)) {
    throw ValidationError("ground state was computed for " + gs.params.describe() + ", not " +
                          params.describe());
  }
  if (u0.grid().dimension() != params.dimension()) {
    throw ValidationError("initial data dimension does not match N");
  }
  DichotomyVerdict v;
  v.s_c = params.critical_regularity();
  v.alpha = params.alpha();
  v.regime = params.regime();

  const Thresholds th = threshold_quantities(gs, params);
  v.threshold_EM = th.em;
  v.threshold_GM = th.gm;

  const FieldSummary s = summarize(u0, params);
  if (s.energy <= 0.0 && v.s_c > kCriticalTolerance) {
    v.negative_energy_shortcut = true;
    v.value_EM = s.energy;
    v.margin_EM = std::numeric_limits<double>::infinity();
    v.cond_EM_satisfied = true;
  } else {
    v.value_EM = mix(s.energy, s.mass, v.s_c);
    v.margin_EM = v.threshold_EM - v.value_EM;
    v.cond_EM_satisfied = v.margin_EM > kThresholdTolerance * std::abs(v.threshold_EM);
  }

  v.value_GM = mix(std::sqrt(s.gradient_norm_sq), std::sqrt(s.mass), v.s_c);
  v.margin_GM = v.value_GM - v.threshold_GM;
  v.cond_GM_satisfied = v.margin_GM > kThresholdTolerance * std::abs(v.threshold_GM);

  if (v.cond_EM_satisfied && v.cond_GM_satisfied) {
    if (v.regime == Regime::case1_finite) v.predicted = Prediction::finite_time_blowup;
    if (v.regime == Regime::case2_rate) v.predicted = Prediction::finite_or_infinite_blowup_with_rate;
  }
  return v;
}

namespace {

std::size_t tail_start(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("tail fraction must be in (0, 1]");
  const auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  return n - std::max<std::size_t>(keep, 1);
}

}  // namespace

OdeCheck ode_mechanism_check(const std::vector<TimeSeriesRecord>& series, const OdeOptions& options) {
  const std::size_t n = series.size();
  if (n < options.min_samples) {
    throw ValidationError("insufficient data: " + std::to_string(n) + " samples, need " +
                          std::to_string(options.min_samples));
  }
  for (const auto& r : series) {
    if (std::isnan(r.Iprime)) throw ValidationError("series has no I' column");
  }

  // Scan backwards: T0 is the earliest sample from which I' stays negative,
  // with sub-noise values neither breaking nor starting the run.
  auto noise = [&](const TimeSeriesRecord& r) {
    const double R = std::isfinite(r.R_cutoff) ? r.R_cutoff : 1.0;
    return options.noise_factor * R * std::sqrt(r.grad_norm_sq * r.mass);
  };
  std::optional<std::size_t> start;
  for (std::size_t k = n; k-- > 0;) {
    const double ip = series[k].Iprime;
    if (std::abs(ip) <= noise(series[k])) continue;
    if (ip > 0.0) break;
    start = k;
  }

  OdeCheck c;
  if (!start) return c;
  c.T0_index = start;
  c.T0 = series[*start].t;
  double f = 0.0;
  for (std::size_t k = *start; k < n; ++k) {
    if (k > *start) {
      const double h = series[k].t - series[k - 1].t;
      f += 0.5 * h * (series[k].grad_norm_sq + series[k - 1].grad_norm_sq);
    }
    c.times.push_back(series[k].t);
    c.f_series.push_back(f);
  }
  const std::size_t from = tail_start(c.f_series.size(), options.tail_fraction);
  for (std::size_t k = from; k < c.f_series.size(); ++k) {
    const double fp = series[*start + k].grad_norm_sq;
    if (fp > 0.0) c.ode_constant = std::max(c.ode_constant, c.f_series[k] * c.f_series[k] / fp);
  }
  c.monotone = true;
  for (std::size_t k = *start + 1; k < n; ++k) {
    if (series[k].I > series[k - 1].I + noise(series[k]) * (series[k].t - series[k - 1].t)) {
      c.monotone = false;
    }
  }
  return c;
}

RateReport rate_report(const std::vector<TimeSeriesRecord>& series, const ModelParams& params,
                       const OdeOptions& options) {
  const auto e = params.rate_exponent();
  if (!e) throw ValidationError("rate report needs alpha > 1 (case 2); got " + params.describe());
  if (!(params.b() > 0.0)) throw ValidationError("rate report needs b > 0");

  RateReport rep;
  rep.expected_exponent = *e;
  double sup = 0.0;
  for (const auto& r : series) {
    sup = std::max(sup, std::sqrt(r.grad_norm_sq));
    if (!(r.t > 0.0)) continue;
    rep.times.push_back(r.t);
    rep.sup_grad.push_back(sup);
    rep.R_of_T.push_back(std::pow(sup, 1.0 / *e));
  }
  const std::size_t n = rep.times.size();
  if (n < 2) throw ValidationError("rate report needs at least two samples with t > 0");

  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    rep.min_ratio = std::min(rep.min_ratio, rep.R_of_T[k] / rep.times[k]);
    if (k > 0 && rep.R_of_T[k] < rep.R_of_T[k - 1]) {
      throw VerificationError("R(T) decreased; running supremum is broken");
    }
  }

  rep.tail_start = std::min(tail_start(n, options.tail_fraction), n - 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(n - rep.tail_start);
  for (std::size_t k = rep.tail_start; k < n; ++k) {
    const double x = std::log(rep.times[k]), y = std::log(rep.sup_grad[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  rep.fitted_exponent = den > 0.0 ? (m * sxy - sx * sy) / den : 0.0;

  const bool has_iprime = std::none_of(series.begin(), series.end(),
                                       [](const TimeSeriesRecord& r) { return std::isnan(r.Iprime); });
  if (has_iprime && series.size() >= options.min_samples) rep.ode = ode_mechanism_check(series, options);
  return rep;
}

double empirical_delta0(const std::vector<TimeSeriesRecord>& series) {
  if (series.empty()) throw ValidationError("empty series");
  double d = std::numeric_limits<double>::infinity();
  for (const auto& r : series) d = std::min(d, r.delta_instant);
  return d;
}

double case1_radius(double delta0, double g, const ModelParams& params, double constant) {
  if (!(delta0 > 0.0)) throw ValidationError("case-1 radius needs delta0 > 0");
  if (!(g > 0.0)) throw ValidationError("case-1 radius needs a positive gradient norm");
  if (!(params.b() > 0.0)) throw ValidationError("case-1 radius needs b > 0");
  const double lhs = constant * std::pow(g, 2.0 * params.alpha() - 2.0) / (4.0 * delta0);
  return std::pow(lhs, 1.0 / params.b());
}

Case1Monitor case1_inequality_check(const std::vector<TimeSeriesRecord>& series, double delta0) {
  Case1Monitor m;
  m.worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : series) {
    if (std::isnan(r.Idoubleprime)) continue;
    const double bound = 4.0 * delta0 * r.grad_norm_sq;
    ++m.samples;
    const double excess = (r.Idoubleprime + bound) / bound;
    m.worst = std::max(m.worst, excess);
    if (excess > 0.0) ++m.violations;
  }
  return m;
}

}  // namespace inls
