#include "inls/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include "inls/error.hpp"
#include "inls/functionals.hpp"
#include "inls/virial.hpp"

#ifndef INLS_VERSION
#define INLS_VERSION "0.0.0"
#endif

namespace inls {

using nlohmann::json;

std::string software_version() { return INLS_VERSION; }

namespace {

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

template <class T>
json opt(const std::optional<T>& x) {
  if (!x) return nullptr;
  if constexpr (std::is_floating_point_v<T>) return num(*x);
  else return json(*x);
}

FieldState onto(const FieldState& u, GridPtr grid) {
  if (u.grid() == *grid) return FieldState(grid, {u.values().begin(), u.values().end()});
  if (u.grid().dimension() != grid->dimension()) {
    throw ValidationError("profile dimension does not match N");
  }
  return FieldState::from_function(grid, [&](double r) { return interpolate(u, r); });
}

}  // namespace

GroundStateSummary summarize(const GroundState& gs) {
  GroundStateSummary s;
  s.mass_Q = gs.mass_Q;
  s.energy_Q = gs.energy_Q;
  s.grad_Q = gs.grad_Q;
  s.threshold_EM = gs.threshold_EM;
  s.threshold_GM = gs.threshold_GM;
  s.residual = gs.residual;
  s.pohozaev_defect = gs.pohozaev_defect;
  s.method = to_string(gs.method);
  s.iterations = gs.iterations;
  return s;
}

int RunManifest::exit_code() const {
  int code = 0;
  for (const auto& e : errors) code = std::max(code, e.exit_code);
  return code;
}

json to_json(const RunManifest& m) {
  json j;
  j["version"] = m.version;
  j["config"] = to_json(m.config);
  j["directory"] = m.directory.string();
  const auto& c = m.criticality;
  j["criticality"] = {{"s_c", c.s_c},
                      {"alpha", c.alpha},
                      {"rate_exponent", opt(c.rate_exponent)},
                      {"regime", to_string(c.regime)}};
  if (m.ground_state) {
    const auto& g = *m.ground_state;
    j["ground_state"] = {{"mass_Q", g.mass_Q},
                         {"energy_Q", g.energy_Q},
                         {"grad_Q", g.grad_Q},
                         {"threshold_EM", opt(g.threshold_EM)},
                         {"threshold_GM", opt(g.threshold_GM)},
                         {"residual", g.residual},
                         {"pohozaev_defect", g.pohozaev_defect},
                         {"method", g.method},
                         {"iterations", g.iterations}};
  } else {
    j["ground_state"] = nullptr;
  }
  if (m.verdict) {
    const auto& v = *m.verdict;
    j["verdict"] = {{"s_c", v.s_c},
                    {"alpha", v.alpha},
                    {"regime", to_string(v.regime)},
                    {"value_EM", num(v.value_EM)},
                    {"threshold_EM", num(v.threshold_EM)},
                    {"margin_EM", num(v.margin_EM)},
                    {"cond_EM_satisfied", v.cond_EM_satisfied},
                    {"negative_energy_shortcut", v.negative_energy_shortcut},
                    {"value_GM", num(v.value_GM)},
                    {"threshold_GM", num(v.threshold_GM)},
                    {"margin_GM", num(v.margin_GM)},
                    {"cond_GM_satisfied", v.cond_GM_satisfied},
                    {"predicted", to_string(v.predicted)}};
  } else {
    j["verdict"] = nullptr;
  }
  j["outcome"] = {{"status", m.status ? json(to_string(*m.status)) : json(nullptr)},
                  {"t_end", m.t_end},
                  {"steps", m.steps},
                  {"records", m.records},
                  {"reason", m.status_reason},
                  {"grad_initial", num(m.grad_initial)},
                  {"grad_final", num(m.grad_final)}};
  j["delta0"] = opt(m.delta0);
  auto ode_json = [](const OdeCheck& o) {
    return json{{"T0", opt(o.T0)},
                {"T0_index", opt(o.T0_index)},
                {"ode_constant", num(o.ode_constant)},
                {"monotone", o.monotone},
                {"samples", o.f_series.size()}};
  };
  if (m.rate) {
    const auto& r = *m.rate;
    j["rate"] = {{"expected_exponent", r.expected_exponent},
                 {"fitted_exponent", num(r.fitted_exponent)},
                 {"min_ratio", num(r.min_ratio)},
                 {"tail_start", r.tail_start},
                 {"samples", r.times.size()},
                 {"final_sup_grad", num(r.sup_grad.back())},
                 {"final_R_of_T", num(r.R_of_T.back())}};
  } else {
    j["rate"] = nullptr;
  }
  j["ode"] = m.ode ? ode_json(*m.ode) : json(nullptr);
  j["skipped"] = json::object();
  for (const auto& [stage, why] : m.skipped) j["skipped"][stage] = why;
  j["errors"] = json::array();
  for (const auto& e : m.errors) {
    j["errors"].push_back({{"stage", e.stage}, {"exit_code", e.exit_code}, {"message", e.message}});
  }
  j["exit_code"] = m.exit_code();
  j["wall_seconds"] = m.wall_seconds;
  return j;
}

GroundState obtain_ground_state(const RunConfig& config) {
  const auto grid = RadialGrid::make(config.model.dimension(), config.r_max, config.cells);
  if (config.ground_state.profile) {
    GroundState loaded = read_profile(*config.ground_state.profile);
    if (!(loaded.params == config.model)) {
      throw ValidationError("ground-state profile is for " + loaded.params.describe() + ", not " +
                            config.model.describe());
    }
    if (loaded.profile.grid() == *grid) return loaded;
    return make_ground_state(config.model, onto(loaded.profile, grid), loaded.method,
                             loaded.iterations);
  }
  GroundStateOptions opts;
  opts.method = config.ground_state.method;
  return solve_ground_state(config.model, grid, opts);
}

FieldState build_initial_data(const RunConfig& config, GridPtr grid, const GroundState* gs) {
  const auto& spec = config.initial;
  switch (spec.kind) {
    case InitialKind::gaussian:
      return FieldState::from_function(grid, [&](double r) {
        const double x = r / spec.width;
        return Complex(spec.amplitude * std::exp(-x * x), 0.0);
      });
    case InitialKind::ground_state_multiple:
      if (!gs) throw ValidationError("ground_state_multiple needs a ground state");
      return onto(gs->profile, grid).scaled(spec.multiple);
    case InitialKind::from_file:
      return onto(read_profile(spec.file).profile, grid).scaled(spec.multiple);
  }
  throw ValidationError("unknown initial data kind");
}

RunManifest run_simulation(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest m;
  m.config = config;
  m.version = software_version();
  m.criticality = compute_criticality(config.model);
  std::vector<TimeSeriesRecord> series;
  bool evolved = false;

  auto fail = [&](const std::string& stage, const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    m.errors.push_back({stage, err ? err->exit_code() : 2, e.what()});
  };
  // Runs one stage; false when it failed.
  auto stage = [&](const std::string& name, auto&& body) {
    try {
      body();
      return true;
    } catch (const std::exception& e) {
      fail(name, e);
      return false;
    }
  };

  GridPtr grid;
  std::optional<GroundState> gs;
  std::optional<FieldState> u0;
  bool ok = stage("setup", [&] {
    m.directory = config.run_directory();
    config.validate();
    grid = RadialGrid::make(config.model.dimension(), config.r_max, config.cells);
  });

  const bool need_q = config.initial.kind == InitialKind::ground_state_multiple;
  if (ok && (config.diagnostics.classify || need_q)) {
    stage("ground_state", [&] {
      gs = obtain_ground_state(config);
      m.ground_state = summarize(*gs);
    });
  }
  if (ok && !(need_q && !gs)) {
    ok = stage("initial_data", [&] { u0 = build_initial_data(config, grid, gs ? &*gs : nullptr); });
  } else if (ok) {
    m.skipped.emplace_back("initial_data", "no ground state to scale");
    ok = false;
  }
  if (ok && config.diagnostics.classify) {
    if (gs) {
      stage("classify", [&] { m.verdict = classify(*u0, config.model, *gs); });
    } else {
      m.skipped.emplace_back("classify", "no ground state");
    }
  }
  if (ok) {
    stage("evolution", [&] {
      const double R = config.diagnostics.R.value_or(config.r_max);
      const Recorder rec = make_virial_recorder(config.model, *grid, config.diagnostics.cutoff_mode, R);
      RunOutcome out = evolve(*u0, config.model, config.evolution, rec);
      evolved = true;
      m.status = out.status;
      m.t_end = out.t_end;
      m.steps = out.steps;
      m.records = out.series.size();
      m.status_reason = out.reason;
      m.grad_initial = out.grad_initial;
      m.grad_final = out.grad_final;
      series = std::move(out.series);
      if (out.status == RunStatus::numerical_failure) throw SolverError(out.reason);
    });
  }
  if (evolved && !series.empty()) {
    stage("delta0", [&] { m.delta0 = empirical_delta0(series); });
    if (config.model.rate_exponent() && config.model.b() > 0.0) {
      stage("rate", [&] {
        if (std::count_if(series.begin(), series.end(), [](const auto& r) { return r.t > 0.0; }) < 2) {
          m.skipped.emplace_back("rate", "fewer than two samples with t > 0");
          return;
        }
        m.rate = rate_report(series, config.model);
      });
    } else {
      m.skipped.emplace_back("rate", "needs alpha > 1 and b > 0");
    }
    if (series.size() >= OdeOptions{}.min_samples) {
      stage("ode", [&] { m.ode = ode_mechanism_check(series); });
    } else {
      m.skipped.emplace_back("ode", "fewer than " + std::to_string(OdeOptions{}.min_samples) + " samples");
    }
  }

  if (evolved) stage("write_series", [&] { write_series_csv(series, m.directory / "series.csv"); });
  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!m.directory.empty()) write_json_atomic(to_json(m), m.directory / "manifest.json");
  return m;
}

SweepResult run_sweep(const std::vector<RunConfig>& configs, int parallelism,
                      const std::filesystem::path& summary_directory) {
  if (parallelism < 1) throw ValidationError("parallelism must be at least 1");
  SweepResult result;
  result.manifests.resize(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) {
      try {
        result.manifests[i] = run_simulation(configs[i]);
      } catch (const std::exception& e) {
        RunManifest& m = result.manifests[i];
        m.config = configs[i];
        m.version = software_version();
        const auto* err = dynamic_cast<const Error*>(&e);
        m.errors.push_back({"manifest", err ? err->exit_code() : 3, e.what()});
      }
    }
  };
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(parallelism), configs.size());
  std::vector<std::jthread> pool;
  for (std::size_t k = 0; k < n; ++k) pool.emplace_back(worker);
  pool.clear();

  for (const auto& m : result.manifests) result.exit_code = std::max(result.exit_code, m.exit_code());

  if (!summary_directory.empty() && !configs.empty()) {
    std::string text = "label,exit_code,status,t_end,steps,predicted,delta0,min_ratio,directory\n";
    char buf[64];
    auto g = [&](std::optional<double> x) {
      if (!x) return std::string();
      std::snprintf(buf, sizeof buf, "%.17g", *x);
      return std::string(buf);
    };
    for (const auto& m : result.manifests) {
      text += m.config.output.label + "," + std::to_string(m.exit_code()) + "," +
              (m.status ? to_string(*m.status) : "") + "," + g(m.status ? std::optional(m.t_end) : std::nullopt) +
              "," + std::to_string(m.steps) + "," + (m.verdict ? to_string(m.verdict->predicted) : "") +
              "," + g(m.delta0) + "," + g(m.rate ? std::optional(m.rate->min_ratio) : std::nullopt) +
              "," + m.directory.string() + "\n";
    }
    write_text_atomic(text, summary_directory / "summary.csv");
  }
  return result;
}

}  // namespace inls
