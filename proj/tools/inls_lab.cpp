// inls_lab: command-line front end for the radial INLS lab.
//
// Exit codes: 0 ok, 1 validation, 2 solver failure, 3 I/O, 4 identity check
// failed.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "inls/config.hpp"
#include "inls/dichotomy.hpp"
#include "inls/error.hpp"
#include "inls/functionals.hpp"
#include "inls/ground_state.hpp"
#include "inls/runner.hpp"

namespace {

using nlohmann::json;

struct Globals {
  std::string config;
  std::string out;
  bool quiet = false;
};

inls::RunConfig load(const Globals& g, bool required = true) {
  inls::RunConfig c;
  if (!g.config.empty()) {
    c = inls::load_config(g.config);
  } else if (required) {
    throw inls::ValidationError("--config is required for this subcommand");
  }
  if (!g.out.empty()) c.output.directory = g.out;
  return c;
}

void say(const Globals& g, const std::string& line) {
  if (!g.quiet) std::cout << line << '\n';
}

std::string show(const json& x) { return x.is_null() ? "n/a" : x.dump(); }

int cmd_ground_state(const Globals& g) {
  const auto cfg = load(g);
  const auto gs = inls::obtain_ground_state(cfg);
  const auto dir = cfg.run_directory();
  std::filesystem::create_directories(dir);
  inls::write_profile(gs, dir / "ground_state.txt");
  const auto s = inls::summarize(gs);
  const json j = {{"params", {{"N", gs.params.dimension()}, {"b", gs.params.b()}, {"p", gs.params.p()}}},
                  {"mass_Q", s.mass_Q},
                  {"energy_Q", s.energy_Q},
                  {"grad_Q", s.grad_Q},
                  {"threshold_EM", s.threshold_EM ? json(*s.threshold_EM) : json(nullptr)},
                  {"threshold_GM", s.threshold_GM ? json(*s.threshold_GM) : json(nullptr)},
                  {"residual", s.residual},
                  {"pohozaev_defect", s.pohozaev_defect},
                  {"method", s.method},
                  {"iterations", s.iterations},
                  {"version", inls::software_version()}};
  inls::write_json_atomic(j, dir / "ground_state.json");
  for (const char* k : {"mass_Q", "energy_Q", "grad_Q", "threshold_EM", "threshold_GM", "residual",
                        "pohozaev_defect", "iterations"}) {
    say(g, std::string(k) + " = " + show(j[k]));
  }
  say(g, "wrote " + (dir / "ground_state.txt").string());
  return 0;
}

int cmd_evolve(const Globals& g) {
  const auto m = inls::run_simulation(load(g));
  const json j = inls::to_json(m);
  say(g, "status = " + show(j["outcome"]["status"]) + ", t_end = " + show(j["outcome"]["t_end"]) +
             ", steps = " + show(j["outcome"]["steps"]));
  if (!j["verdict"].is_null()) say(g, "predicted = " + show(j["verdict"]["predicted"]));
  say(g, "delta0 = " + show(j["delta0"]));
  if (!j["rate"].is_null()) say(g, "min R(T)/T = " + show(j["rate"]["min_ratio"]));
  if (!j["ode"].is_null()) {
    say(g, "T0 = " + show(j["ode"]["T0"]) + ", ode_constant = " + show(j["ode"]["ode_constant"]));
  }
  for (const auto& e : m.errors) std::cerr << "error [" << e.stage << "]: " << e.message << '\n';
  say(g, "wrote " + (m.directory / "manifest.json").string());
  return m.exit_code();
}

int cmd_classify(const Globals& g) {
  const auto cfg = load(g);
  const auto gs = inls::obtain_ground_state(cfg);
  const auto grid = inls::RadialGrid::make(cfg.model.dimension(), cfg.r_max, cfg.cells);
  const auto u0 = inls::build_initial_data(cfg, grid, &gs);
  const auto v = inls::classify(u0, cfg.model, gs);
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  const json j = {{"s_c", v.s_c},
                  {"alpha", v.alpha},
                  {"regime", inls::to_string(v.regime)},
                  {"value_EM", num(v.value_EM)},
                  {"threshold_EM", num(v.threshold_EM)},
                  {"margin_EM", num(v.margin_EM)},
                  {"cond_EM_satisfied", v.cond_EM_satisfied},
                  {"negative_energy_shortcut", v.negative_energy_shortcut},
                  {"value_GM", num(v.value_GM)},
                  {"threshold_GM", num(v.threshold_GM)},
                  {"margin_GM", num(v.margin_GM)},
                  {"cond_GM_satisfied", v.cond_GM_satisfied},
                  {"predicted", inls::to_string(v.predicted)},
                  {"version", inls::software_version()}};
  inls::write_json_atomic(j, cfg.run_directory() / "classification.json");
  for (const char* k : {"s_c", "alpha", "regime", "margin_EM", "cond_EM_satisfied", "margin_GM",
                        "cond_GM_satisfied", "predicted"}) {
    say(g, std::string(k) + " = " + show(j[k]));
  }
  return 0;
}

int cmd_verify(const Globals& g) {
  const auto cfg = load(g, false);
  const auto rep = inls::verify_identities(cfg);
  inls::write_json_atomic(inls::to_json(rep), cfg.run_directory() / "verification.json");
  char buf[256];
  for (const auto& c : rep.checks) {
    std::snprintf(buf, sizeof buf, "%-4s %-32s measured %.3e  tolerance %.1e", c.passed ? "ok" : "FAIL",
                  c.name.c_str(), c.measured, c.tolerance);
    say(g, buf);
  }
  say(g, rep.all_passed() ? "all identity checks passed" : "identity checks FAILED");
  return rep.exit_code();
}

int cmd_rate(const Globals& g, const std::string& series_path) {
  const auto cfg = load(g);
  const auto path = series_path.empty() ? cfg.run_directory() / "series.csv"
                                        : std::filesystem::path(series_path);
  const auto series = inls::read_series_csv(path);
  const auto r = inls::rate_report(series, cfg.model);
  json j = {{"series", path.string()},
            {"expected_exponent", r.expected_exponent},
            {"fitted_exponent", r.fitted_exponent},
            {"min_ratio", r.min_ratio},
            {"tail_start", r.tail_start},
            {"samples", r.times.size()},
            {"times", r.times},
            {"sup_grad", r.sup_grad},
            {"R_of_T", r.R_of_T},
            {"version", inls::software_version()}};
  if (r.ode) {
    j["ode"] = {{"T0", r.ode->T0 ? json(*r.ode->T0) : json(nullptr)},
                {"ode_constant", r.ode->ode_constant},
                {"monotone", r.ode->monotone}};
  }
  inls::write_json_atomic(j, cfg.run_directory() / "rate.json");
  for (const char* k : {"expected_exponent", "fitted_exponent", "min_ratio", "samples"}) {
    say(g, std::string(k) + " = " + show(j[k]));
  }
  return 0;
}

int cmd_sweep(const Globals& g, int parallel) {
  if (g.config.empty()) throw inls::ValidationError("--config is required for sweep");
  auto sweep = inls::load_sweep(g.config);
  if (!g.out.empty()) {
    sweep.summary_directory = g.out;
    for (auto& c : sweep.runs) c.output.directory = g.out;
  }
  if (parallel > 0) sweep.parallelism = parallel;
  const auto res = inls::run_sweep(sweep.runs, sweep.parallelism, sweep.summary_directory);
  for (const auto& m : res.manifests) {
    say(g, m.config.output.label + ": exit " + std::to_string(m.exit_code()) + ", status " +
               (m.status ? inls::to_string(*m.status) : std::string("n/a")));
  }
  say(g, std::to_string(res.manifests.size()) + " runs, exit " + std::to_string(res.exit_code));
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial inhomogeneous NLS lab"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "YAML run config (sweep document for 'sweep')");
  app.add_option("--out", g.out, "Output root; overrides output.directory and INLS_LAB_OUT");
  app.add_flag("--quiet", g.quiet, "Print nothing on success");

  auto* gs = app.add_subcommand("ground-state", "Solve for Q and write the profile");
  auto* ev = app.add_subcommand("evolve", "Classify, evolve and post-process one run");
  auto* cl = app.add_subcommand("classify", "Evaluate the threshold conditions for u0");
  auto* vi = app.add_subcommand("verify-identities", "Run the virial identity suite");
  auto* ra = app.add_subcommand("rate", "Rate report from a series file");
  std::string series;
  ra->add_option("--series", series, "Series CSV (default: <run dir>/series.csv)");
  auto* sw = app.add_subcommand("sweep", "Run a sweep document");
  int parallel = 0;
  sw->add_option("--parallel", parallel, "Override the sweep's parallelism")->check(CLI::PositiveNumber);
  for (auto* s : {gs, ev, cl, vi, ra, sw}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gs) return cmd_ground_state(g);
    if (*ev) return cmd_evolve(g);
    if (*cl) return cmd_classify(g);
    if (*vi) return cmd_verify(g);
    if (*ra) return cmd_rate(g, series);
    if (*sw) return cmd_sweep(g, parallel);
  } catch (const inls::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
