#include "inls/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "inls/error.hpp"
#include "inls/functionals.hpp"
#include "inls/kernels/kernels.hpp"

namespace inls {

void EvolutionConfig::validate() const {
  if (!(dt_initial > 0.0)) throw ValidationError("dt_initial must be positive");
  if (!(dt_min > 0.0)) throw ValidationError("dt_min must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
    throw ValidationError("t_final must be finite and non-negative");
  }
  if (!(c_adapt > 0.0)) throw ValidationError("c_adapt must be positive");
  if (!(max_phase_step > 0.0)) throw ValidationError("max_phase_step must be positive");
  if (!(blowup_gradient_factor > 1.0)) {
    throw ValidationError("blowup_gradient_factor must exceed 1");
  }
  if (record_stride < 1) throw ValidationError("record_stride must be at least 1");
  if (!(resolution_limit > 0.0) || std::isnan(resolution_limit)) throw ValidationError("resolution_limit must be positive");
  if (max_steps < 1) throw ValidationError("max_steps must be at least 1");
}

EvolutionConfig EvolutionConfig::refined(double factor) const {
  EvolutionConfig c = *this;
  c.dt_initial /= factor;
  c.c_adapt /= factor;
  c.max_phase_step /= factor;
  c.dt_min /= factor;
  return c;
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed_horizon: return "completed_horizon";
    case RunStatus::blowup_detected: return "blowup_detected";
    case RunStatus::step_underflow: return "step_underflow";
    case RunStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

TimeSeriesRecord basic_record(const FieldState& u, const ModelParams& params) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const FieldSummary s = summarize(u, params);
  TimeSeriesRecord r;
  r.t = u.time();
  r.mass = s.mass;
  r.energy = s.energy;
  r.grad_norm_sq = s.gradient_norm_sq;
  r.K = s.k;
  r.I = r.Iprime = r.Idoubleprime = r.R1 = r.R2 = r.R3 = r.R_cutoff = nan;
  r.delta_instant = s.gradient_norm_sq > 0.0 ? -s.k / s.gradient_norm_sq : 0.0;
  return r;
}

Stepper::Stepper(const ModelParams& params, GridPtr grid)
    : params_(params),
      grid_(std::move(grid)),
      lap_(*grid_),
      potential_(inverse_power_table(*grid_, params.b())) {
  if (grid_->dimension() != params.dimension()) {
    throw ValidationError("grid dimension does not match N");
  }
}

void Stepper::phase(std::span<Complex> u, double h) const {
  const double q = 0.5 * (params_.p() - 1.0);
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double a2 = std::norm(u[j]);
    if (a2 == 0.0) continue;
    const double amp = q == 1.0 ? a2 : std::pow(a2, q);
    u[j] *= std::polar(1.0, h * potential_[j] * amp);
  }
}

double Stepper::max_frequency(const FieldState& u) const {
  const double q = 0.5 * (params_.p() - 1.0);
  double w = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double a2 = std::norm(u[j]);
    w = std::max(w, potential_[j] * (q == 1.0 ? a2 : std::pow(a2, q)));
  }
  return w;
}

void Stepper::advance(FieldState& u, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("step size must be positive");
  if (u.grid_ptr() != grid_ && !(u.grid() == *grid_)) {
    throw ValidationError("field grid does not match the stepper grid");
  }
  const std::size_t n = u.size();
  auto v = u.values();
  phase(v, 0.5 * dt);

  const double tau = 0.5 * dt;
  if (tau != tau_) {
    // Thomas factorization of I - i tau Lap_h. Each row is strictly
    // diagonally dominant (|1 + i tau |d|| > tau |d|), so no pivoting.
    const Complex itau(0.0, tau);
    sub_.resize(n);
    cprime_.resize(n);
    inv_pivot_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const Complex a = -itau * lap_.lower[j];
      const Complex d = 1.0 - itau * lap_.diag[j];
      const Complex c = -itau * lap_.upper[j];
      const Complex pivot = j == 0 ? d : d - a * cprime_[j - 1];
      if (std::abs(pivot) == 0.0) throw SolverError("Crank-Nicolson factorization broke down");
      sub_[j] = a;
      inv_pivot_[j] = 1.0 / pivot;
      cprime_[j] = c * inv_pivot_[j];
    }
    tau_ = tau;
  }

  rhs_.resize(n);
  kernels::active().cn_rhs(lap_.lower.data(), lap_.diag.data(), lap_.upper.data(), tau, v.data(),
                           rhs_.data(), n);
  v[0] = rhs_[0] * inv_pivot_[0];
  for (std::size_t j = 1; j < n; ++j) v[j] = (rhs_[j] - sub_[j] * v[j - 1]) * inv_pivot_[j];
  for (std::size_t j = n - 1; j-- > 0;) v[j] -= cprime_[j] * v[j + 1];

  phase(v, 0.5 * dt);
  u.set_time(u.time() + dt);
}

FieldState step(const FieldState& u, const ModelParams& params, double dt) {
  u.require_finite();
  Stepper s(params, u.grid_ptr());
  FieldState out = u;
  s.advance(out, dt);
  return out;
}

double resolution_ratio(const FieldState& u) {
  double peak = 0.0, jump = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    peak = std::max(peak, std::abs(u[j]));
    if (j + 1 < u.size()) jump = std::max(jump, std::abs(std::abs(u[j + 1]) - std::abs(u[j])));
  }
  return peak > 0.0 ? jump / peak : 0.0;
}

RunOutcome evolve(const FieldState& u0, const ModelParams& params, const EvolutionConfig& cfg,
                  const Recorder& recorder) {
  RunOutcome out;
  out.t_end = u0.time();
  auto record = [&](const FieldState& u) {
    return recorder ? recorder(u) : basic_record(u, params);
  };

  try {
    cfg.validate();
    u0.require_finite();
    FieldState u = u0;
    Stepper stepper(params, u.grid_ptr());
    double g = gradient_norm_sq(u);
    out.grad_initial = std::sqrt(g);
    out.series.push_back(record(u));

    const double t0 = u.time();
    const double t_stop = t0 + cfg.t_final;
    const double trigger = cfg.blowup_gradient_factor * out.grad_initial;
    bool last_recorded = true;
    auto finish = [&](RunStatus status, std::string reason) {
      out.status = status;
      out.reason = std::move(reason);
      out.t_end = u.time();
      out.grad_final = std::sqrt(g);
      if (!last_recorded && u.all_finite()) out.series.push_back(record(u));
      out.final_state = u;
    };

    while (true) {
      const double remaining = t_stop - u.time();
      if (remaining <= 1e-14 * std::max(1.0, std::abs(t_stop))) {
        finish(RunStatus::completed_horizon, "");
        break;
      }
      double dt = cfg.dt_initial;
      if (cfg.adaptive) {
        dt = std::min(dt, cfg.c_adapt / std::max(1.0, g));
        const double w = stepper.max_frequency(u);
        if (w > 0.0) dt = std::min(dt, cfg.max_phase_step / w);
      }
      if (dt < cfg.dt_min) {
        finish(RunStatus::step_underflow, "adaptive step fell below dt_min");
        break;
      }
      if (out.steps >= cfg.max_steps) {
        finish(RunStatus::numerical_failure, "step budget exhausted");
        break;
      }
      // Land exactly on the horizon; avoid a sliver of a final step.
      if (dt >= remaining || remaining - dt < 1e-3 * dt) dt = remaining;

      stepper.advance(u, dt);
      if (remaining == dt) u.set_time(t_stop);
      ++out.steps;
      last_recorded = false;
      if (!u.all_finite()) {
        out.status = RunStatus::numerical_failure;
        out.reason = "non-finite amplitudes";
        out.t_end = u.time();
        out.grad_final = std::numeric_limits<double>::infinity();
        out.final_state = u;
        return out;
      }
      g = gradient_norm_sq(u);
      if (out.steps % static_cast<std::size_t>(cfg.record_stride) == 0) {
        out.series.push_back(record(u));
        last_recorded = true;
      }
      if (std::sqrt(g) > trigger) {
        finish(RunStatus::blowup_detected, "gradient norm exceeded the trigger factor");
        break;
      }
      if (resolution_ratio(u) > cfg.resolution_limit) {
        finish(RunStatus::numerical_failure, "underresolved: profile sharper than the grid");
        break;
      }
    }
  } catch (const Error& e) {
    out.status = RunStatus::numerical_failure;
    out.reason = e.what();
  }
  return out;
}

}  // namespace inls
