#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "inls/config.hpp"
#include "inls/dichotomy.hpp"
#include "inls/evolution.hpp"
#include "inls/ground_state.hpp"

namespace inls {

std::string software_version();

// Fixed header of the time-series file.
inline constexpr const char* kSeriesHeader =
    "t,mass,energy,grad_norm_sq,K,I,Iprime,Idoubleprime,R1,R2,R3,delta_instant,R_cutoff";

// %.17g per number, so reading back is bit-exact.
void write_series_csv(const std::vector<TimeSeriesRecord>& series, const std::filesystem::path& path);
std::vector<TimeSeriesRecord> read_series_csv(const std::filesystem::path& path);

// Writes to a sibling temporary and renames it into place.
void write_text_atomic(const std::string& text, const std::filesystem::path& path);
void write_json_atomic(const nlohmann::json& j, const std::filesystem::path& path);

struct StageError {
  std::string stage;
  int exit_code = 0;
  std::string message;
};

struct GroundStateSummary {
  double mass_Q = 0.0;
  double energy_Q = 0.0;
  double grad_Q = 0.0;
  std::optional<double> threshold_EM;
  std::optional<double> threshold_GM;
  double residual = 0.0;
  double pohozaev_defect = 0.0;
  std::string method;
  int iterations = 0;
};

GroundStateSummary summarize(const GroundState& gs);

struct RunManifest {
  RunConfig config;
  Criticality criticality;
  std::optional<GroundStateSummary> ground_state;
  std::optional<DichotomyVerdict> verdict;
  std::optional<RunStatus> status;
  double t_end = 0.0;
  std::size_t steps = 0;
  std::size_t records = 0;
  std::string status_reason;
  double grad_initial = 0.0;
  double grad_final = 0.0;
  std::optional<double> delta0;
  std::optional<RateReport> rate;
  std::optional<OdeCheck> ode;
  // Post-processing stages that did not apply (e.g. rate report for
  // alpha <= 1), with the reason.
  std::vector<std::pair<std::string, std::string>> skipped;
  std::vector<StageError> errors;
  std::string version;
  double wall_seconds = 0.0;
  std::filesystem::path directory;

  // 0, or the largest stage exit code.
  int exit_code() const;
};

nlohmann::json to_json(const RunManifest& m);

// Q for the config: loaded from ground_state.profile (interpolated onto the
// run grid if needed) or solved on the run grid.
GroundState obtain_ground_state(const RunConfig& config);

// `gs` is required for ground_state_multiple.
FieldState build_initial_data(const RunConfig& config, GridPtr grid, const GroundState* gs);

// Classify, evolve, post-process; writes series.csv and manifest.json into
// config.run_directory(). Stage errors land in the manifest; only a failure
// to write the manifest itself escapes as IoError.
RunManifest run_simulation(const RunConfig& config);

struct SweepResult {
  std::vector<RunManifest> manifests;
  int exit_code = 0;  // max over runs
};

// At most `parallelism` runs at a time; writes summary.csv into
// summary_directory when it is non-empty and there is at least one run.
SweepResult run_sweep(const std::vector<RunConfig>& configs, int parallelism,
                      const std::filesystem::path& summary_directory = {});

struct IdentityCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerificationReport {
  std::vector<IdentityCheck> checks;
  bool all_passed() const;
  int exit_code() const { return all_passed() ? 0 : 4; }
};

nlohmann::json to_json(const VerificationReport& r);

// Manufactured-field identity suite: cutoff admissibility, decomposition
// residual and R1 sign on random fields, I >= 0, and finite-difference
// consistency of recorded I, I', I'' along a short evolution.
VerificationReport verify_identities(const RunConfig& config);

}  // namespace inls
