#include "inls/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "inls/error.hpp"

namespace inls {

std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::gaussian: return "gaussian";
    case InitialKind::ground_state_multiple: return "ground_state_multiple";
    case InitialKind::from_file: return "from_file";
  }
  return "unknown";
}

namespace {

InitialKind parse_initial_kind(const std::string& s) {
  if (s == "gaussian") return InitialKind::gaussian;
  if (s == "ground_state_multiple") return InitialKind::ground_state_multiple;
  if (s == "from_file") return InitialKind::from_file;
  throw ValidationError("unknown initial_data kind '" + s +
                        "' (gaussian, ground_state_multiple, from_file)");
}

// A mapping whose keys must all come from `allowed`. A missing or null
// section reads as empty.
class Section {
 public:
  Section(const YAML::Node& node, std::string name, std::set<std::string> allowed)
      : node_(node), name_(std::move(name)) {
    if (!node_ || node_.IsNull()) return;
    if (!node_.IsMap()) throw ValidationError("section '" + name_ + "' must be a mapping");
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in " + where());
    }
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }
  YAML::Node node(const std::string& key) const { return has(key) ? node_[key] : YAML::Node(); }

  template <class T>
  void read(const std::string& key, T& out) const {
    if (!has(key)) return;
    const YAML::Node v = node_[key];
    if (!v.IsScalar()) throw ValidationError(where(key) + " must be a scalar");
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      throw ValidationError(where(key) + ": cannot read '" + v.Scalar() + "'");
    }
  }

  // Accepts plain numbers and rationals such as 7/3.
  void read_number(const std::string& key, double& out) const {
    if (!has(key)) return;
    const YAML::Node v = node_[key];
    if (!v.IsScalar()) throw ValidationError(where(key) + " must be a number");
    const std::string s = v.Scalar();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) {
        out = v.as<double>();
      } else {
        out = parse_double(s.substr(0, slash)) / parse_double(s.substr(slash + 1));
      }
    } catch (const YAML::Exception&) {
      throw ValidationError(where(key) + ": cannot read '" + s + "' as a number");
    } catch (const std::logic_error&) {
      throw ValidationError(where(key) + ": cannot read '" + s + "' as a number");
    }
    if (std::isnan(out)) throw ValidationError(where(key) + " is NaN");
  }

  std::string where(const std::string& key = {}) const {
    return key.empty() ? "section '" + name_ + "'" : name_ + "." + key;
  }

 private:
  static double parse_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (s.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(s);
    return v;
  }

  YAML::Node node_;
  std::string name_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

RunConfig from_node(const YAML::Node& root, const std::filesystem::path& base_dir) {
  Section top(root, "config",
              {"model", "grid", "initial_data", "ground_state", "evolution", "diagnostics", "output",
               "verification"});
  RunConfig c;

  Section model(top.node("model"), "model", {"N", "b", "p"});
  int n = c.model.dimension();
  double b = c.model.b(), p = c.model.p();
  model.read("N", n);
  model.read_number("b", b);
  model.read_number("p", p);
  c.model = ModelParams(n, b, p);

  Section grid(top.node("grid"), "grid", {"r_max", "M"});
  grid.read_number("r_max", c.r_max);
  long long cells = static_cast<long long>(c.cells);
  grid.read("M", cells);
  if (!(c.r_max > 0.0) || !std::isfinite(c.r_max)) throw ValidationError("grid.r_max must be positive");
  if (cells < 2) throw ValidationError("grid.M must be at least 2");
  c.cells = static_cast<std::size_t>(cells);

  Section init(top.node("initial_data"), "initial_data", {"kind", "amplitude", "width", "c", "file"});
  std::string kind = to_string(c.initial.kind);
  init.read("kind", kind);
  c.initial.kind = parse_initial_kind(kind);
  init.read_number("amplitude", c.initial.amplitude);
  init.read_number("width", c.initial.width);
  init.read_number("c", c.initial.multiple);
  if (init.has("file")) {
    std::string f;
    init.read("file", f);
    c.initial.file = resolve(base_dir, f);
  }

  Section gs(top.node("ground_state"), "ground_state", {"method", "profile"});
  std::string method = to_string(c.ground_state.method);
  gs.read("method", method);
  c.ground_state.method = parse_ground_state_method(method);
  if (gs.has("profile")) {
    std::string f;
    gs.read("profile", f);
    c.ground_state.profile = resolve(base_dir, f);
  }

  Section ev(top.node("evolution"), "evolution",
             {"dt_initial", "dt_min", "t_final", "c_adapt", "adaptive", "max_phase_step",
              "blowup_gradient_factor", "resolution_limit", "max_steps"});
  auto& e = c.evolution;
  ev.read_number("dt_initial", e.dt_initial);
  ev.read_number("dt_min", e.dt_min);
  ev.read_number("t_final", e.t_final);
  ev.read_number("c_adapt", e.c_adapt);
  ev.read("adaptive", e.adaptive);
  ev.read_number("max_phase_step", e.max_phase_step);
  ev.read_number("blowup_gradient_factor", e.blowup_gradient_factor);
  ev.read_number("resolution_limit", e.resolution_limit);
  long long max_steps = static_cast<long long>(e.max_steps);
  ev.read("max_steps", max_steps);
  if (max_steps < 1) throw ValidationError("evolution.max_steps must be at least 1");
  e.max_steps = static_cast<std::size_t>(max_steps);

  Section diag(top.node("diagnostics"), "diagnostics", {"cutoff_mode", "R", "record_stride", "classify"});
  std::string mode = to_string(c.diagnostics.cutoff_mode);
  diag.read("cutoff_mode", mode);
  c.diagnostics.cutoff_mode = parse_cutoff_mode(mode);
  if (diag.has("R")) {
    double R = 0.0;
    diag.read_number("R", R);
    c.diagnostics.R = R;
  }
  diag.read("record_stride", e.record_stride);
  diag.read("classify", c.diagnostics.classify);

  Section out(top.node("output"), "output", {"directory", "label"});
  if (out.has("directory")) {
    std::string d;
    out.read("directory", d);
    c.output.directory = resolve(base_dir, d);
  }
  out.read("label", c.output.label);

  Section ver(top.node("verification"), "verification",
              {"fields", "radii", "seed", "corrupted_cutoff", "zero_field", "residual_tolerance",
               "r1_tolerance", "fd_tolerance", "fd_dt"});
  auto& v = c.verification;
  ver.read("fields", v.fields);
  if (ver.has("radii")) {
    const YAML::Node radii = ver.node("radii");
    if (!radii.IsSequence()) throw ValidationError("verification.radii must be a list");
    v.radii.clear();
    try {
      for (const auto& r : radii) v.radii.push_back(r.as<double>());
    } catch (const YAML::Exception&) {
      throw ValidationError("verification.radii must hold numbers");
    }
  }
  ver.read("seed", v.seed);
  ver.read("corrupted_cutoff", v.corrupted_cutoff);
  ver.read("zero_field", v.zero_field);
  ver.read_number("residual_tolerance", v.residual_tolerance);
  ver.read_number("r1_tolerance", v.r1_tolerance);
  ver.read_number("fd_tolerance", v.fd_tolerance);
  ver.read_number("fd_dt", v.fd_dt);

  c.validate();
  return c;
}

YAML::Node parse_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ValidationError(std::string("config is not valid YAML: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Key-wise overlay of `over` onto a deep copy of `base`.
YAML::Node merged(const YAML::Node& base, const YAML::Node& over) {
  if (!over || over.IsNull()) return YAML::Clone(base);
  if (!base || !base.IsMap() || !over.IsMap()) return YAML::Clone(over);
  YAML::Node out = YAML::Clone(base);
  for (const auto& kv : over) {
    const auto key = kv.first.as<std::string>();
    out[key] = merged(base[key], kv.second);
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  evolution.validate();
  if (initial.kind == InitialKind::gaussian) {
    if (!std::isfinite(initial.amplitude)) throw ValidationError("initial_data.amplitude must be finite");
    if (!(initial.width > 0.0)) throw ValidationError("initial_data.width must be positive");
  }
  if (!std::isfinite(initial.multiple)) throw ValidationError("initial_data.c must be finite");
  if (initial.kind == InitialKind::from_file) {
    if (initial.file.empty()) throw ValidationError("initial_data.file is required for from_file");
    if (!std::filesystem::is_regular_file(initial.file)) {
      throw ValidationError("initial_data.file does not exist: " + initial.file.string());
    }
  }
  if (ground_state.profile && !std::filesystem::is_regular_file(*ground_state.profile)) {
    throw ValidationError("ground_state.profile does not exist: " + ground_state.profile->string());
  }
  if (diagnostics.cutoff_mode == CutoffMode::adaptive_RT) {
    if (!model.rate_exponent() || !(model.b() > 0.0)) {
      throw ValidationError("cutoff_mode adaptive_RT needs alpha > 1 and b > 0; got " +
                            model.describe());
    }
  } else if (diagnostics.R) {
    if (!(*diagnostics.R > 0.0)) throw ValidationError("diagnostics.R must be positive");
    require_cutoff_fits(RadialGrid(model.dimension(), r_max, cells), build_cutoff(*diagnostics.R));
  }
  if (output.label.empty() || output.label.find('/') != std::string::npos || output.label == "." ||
      output.label == "..") {
    throw ValidationError("output.label must be a plain, non-empty name");
  }
  if (verification.fields < 0) throw ValidationError("verification.fields must be non-negative");
  for (double R : verification.radii) {
    if (!(R > 0.0)) throw ValidationError("verification.radii must be positive");
  }
  if (!(verification.fd_dt > 0.0)) throw ValidationError("verification.fd_dt must be positive");
}

std::filesystem::path RunConfig::output_root() const {
  if (!output.directory.empty()) return output.directory;
  if (const char* env = std::getenv("INLS_LAB_OUT"); env && *env) return env;
  return "inls_runs";
}

RunConfig parse_config(const std::string& yaml, const std::filesystem::path& base_dir) {
  return from_node(parse_yaml(yaml), base_dir);
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

SweepConfig parse_sweep(const std::string& yaml, const std::filesystem::path& base_dir) {
  const YAML::Node root = parse_yaml(yaml);
  Section top(root, "sweep", {"parallelism", "base", "runs", "summary_directory"});
  SweepConfig s;
  top.read("parallelism", s.parallelism);
  if (s.parallelism < 1) throw ValidationError("parallelism must be at least 1");

  const YAML::Node base = top.node("base");
  const RunConfig base_cfg = from_node(base, base_dir);
  const YAML::Node runs = top.node("runs");
  if (runs && !runs.IsNull() && !runs.IsSequence()) throw ValidationError("runs must be a list");

  std::set<std::filesystem::path> dirs;
  std::size_t index = 0;
  for (const auto& entry : runs) {
    RunConfig c = from_node(merged(base, entry), base_dir);
    if (!(entry.IsMap() && entry["output"] && entry["output"]["label"])) {
      c.output.label = base_cfg.output.label + "_" + std::to_string(index);
    }
    const auto dir = c.run_directory().lexically_normal();
    if (!dirs.insert(dir).second) throw ValidationError("two sweep runs share " + dir.string());
    s.runs.push_back(std::move(c));
    ++index;
  }
  if (top.has("summary_directory")) {
    std::string d;
    top.read("summary_directory", d);
    s.summary_directory = resolve(base_dir, d);
  } else {
    s.summary_directory = base_cfg.output_root();
  }
  return s;
}

SweepConfig load_sweep(const std::filesystem::path& path) {
  return parse_sweep(read_file(path), path.parent_path());
}

nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  auto finite_or_null = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  json j;
  j["model"] = {{"N", c.model.dimension()}, {"b", c.model.b()}, {"p", c.model.p()}};
  j["grid"] = {{"r_max", c.r_max}, {"M", c.cells}};
  j["initial_data"] = {{"kind", to_string(c.initial.kind)},
                       {"amplitude", c.initial.amplitude},
                       {"width", c.initial.width},
                       {"c", c.initial.multiple},
                       {"file", c.initial.file.string()}};
  j["ground_state"] = {{"method", to_string(c.ground_state.method)},
                       {"profile", c.ground_state.profile ? json(c.ground_state.profile->string())
                                                          : json(nullptr)}};
  const auto& e = c.evolution;
  j["evolution"] = {{"dt_initial", e.dt_initial},
                    {"dt_min", e.dt_min},
                    {"t_final", e.t_final},
                    {"c_adapt", e.c_adapt},
                    {"adaptive", e.adaptive},
                    {"max_phase_step", e.max_phase_step},
                    {"blowup_gradient_factor", e.blowup_gradient_factor},
                    {"resolution_limit", finite_or_null(e.resolution_limit)},
                    {"max_steps", e.max_steps}};
  j["diagnostics"] = {{"cutoff_mode", to_string(c.diagnostics.cutoff_mode)},
                      {"R", c.diagnostics.R ? json(*c.diagnostics.R) : json(nullptr)},
                      {"record_stride", e.record_stride},
                      {"classify", c.diagnostics.classify}};
  j["output"] = {{"directory", c.output_root().string()}, {"label", c.output.label}};
  const auto& v = c.verification;
  j["verification"] = {{"fields", v.fields},
                       {"radii", v.radii},
                       {"seed", v.seed},
                       {"corrupted_cutoff", v.corrupted_cutoff},
                       {"zero_field", v.zero_field},
                       {"residual_tolerance", v.residual_tolerance},
                       {"r1_tolerance", v.r1_tolerance},
                       {"fd_tolerance", v.fd_tolerance},
                       {"fd_dt", v.fd_dt}};
  return j;
}

}  // namespace inls
