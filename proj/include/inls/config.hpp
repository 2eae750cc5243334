#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "inls/evolution.hpp"
#include "inls/ground_state.hpp"
#include "inls/params.hpp"
#include "inls/virial.hpp"

namespace inls {

enum class InitialKind { gaussian, ground_state_multiple, from_file };

std::string to_string(InitialKind k);

struct InitialDataSpec {
  InitialKind kind = InitialKind::gaussian;
  // gaussian: amplitude * exp(-(r / width)^2)
  double amplitude = 1.0;
  double width = 1.0;
  // ground_state_multiple and from_file: the profile is multiplied by c.
  double multiple = 1.0;
  // from_file: a profile file (see write_profile), interpolated onto the run
  // grid. Relative paths resolve against the config file's directory.
  std::filesystem::path file;
};

struct GroundStateSpec {
  GroundStateMethod method = GroundStateMethod::fixed_point_renormalization;
  // Precomputed profile instead of a fresh solve.
  std::optional<std::filesystem::path> profile;
};

// diagnostics.record_stride in the document lands in
// EvolutionConfig::record_stride.
struct DiagnosticsSpec {
  CutoffMode cutoff_mode = CutoffMode::fixed_R;
  // fixed_R radius; empty means R = r_max (phi = r^2 on the whole grid).
  std::optional<double> R;
  // Solve for Q and classify u0 before evolving.
  bool classify = true;
};

struct OutputSpec {
  // Empty: $INLS_LAB_OUT, else "inls_runs".
  std::filesystem::path directory;
  std::string label = "run";
};

// Manufactured-field identity suite run by verify_identities.
struct VerificationSpec {
  int fields = 100;
  std::vector<double> radii{1.0, 3.0, 10.0};
  std::uint64_t seed = 20240601;
  // Negative control: certify and use the corrupted cutoff instead.
  bool corrupted_cutoff = false;
  // Replace the random fields by u = 0.
  bool zero_field = false;
  double residual_tolerance = 1e-6;
  double r1_tolerance = 1e-10;
  double fd_tolerance = 1e-4;
  double fd_dt = 1e-4;
};

struct RunConfig {
  ModelParams model{3, 0.5, 3.0};
  double r_max = 20.0;
  std::size_t cells = 2048;
  InitialDataSpec initial;
  GroundStateSpec ground_state;
  EvolutionConfig evolution;
  DiagnosticsSpec diagnostics;
  OutputSpec output;
  VerificationSpec verification;

  // Cross-field checks (cutoff fits, adaptive mode needs alpha > 1, files
  // exist). Throws ValidationError.
  void validate() const;

  std::filesystem::path output_root() const;
  std::filesystem::path run_directory() const { return output_root() / output.label; }
};

// Strict parse: unknown sections or keys, wrong types and missing files are
// ValidationErrors. `base_dir` resolves relative file paths.
RunConfig parse_config(const std::string& yaml, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

struct SweepConfig {
  int parallelism = 1;
  std::vector<RunConfig> runs;
  std::filesystem::path summary_directory;
};

// Sweep document:
//   parallelism: 4
//   base: { ...RunConfig sections... }
//   runs:
//     - { output: {label: a}, initial_data: {c: 1.05} }
// Each entry is merged key-wise over `base`. Labels default to
// "<base label>_<index>"; run directories must be distinct.
SweepConfig parse_sweep(const std::string& yaml, const std::filesystem::path& base_dir = {});
SweepConfig load_sweep(const std::filesystem::path& path);

// Fully resolved echo, defaults included.
nlohmann::json to_json(const RunConfig& config);

}  // namespace inls
