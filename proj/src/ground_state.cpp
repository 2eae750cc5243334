#include "inls/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "inls/error.hpp"
#include "inls/functionals.hpp"
#include "inls/radial_ops.hpp"

namespace inls {

std::string to_string(GroundStateMethod m) {
  switch (m) {
    case GroundStateMethod::fixed_point_renormalization: return "fixed_point_renormalization";
    case GroundStateMethod::shooting: return "shooting";
  }
  return "unknown";
}

GroundStateMethod parse_ground_state_method(const std::string& s) {
  if (s == "fixed_point_renormalization" || s == "petviashvili") {
    return GroundStateMethod::fixed_point_renormalization;
  }
  if (s == "shooting") return GroundStateMethod::shooting;
  throw ValidationError("unknown ground-state method '" + s + "'");
}

namespace {

double weighted_norm(std::span<const double> w, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) s += w[j] * v[j] * v[j];
  return std::sqrt(s);
}

double weighted_dot(std::span<const double> w, const std::vector<double>& a,
                    const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += w[j] * a[j] * b[j];
  return s;
}

// r^{-b} |q|^{p-1} q
std::vector<double> nonlinearity(const std::vector<double>& q, const std::vector<double>& rb,
                                 double p) {
  std::vector<double> n(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double a = std::abs(q[j]);
    n[j] = rb[j] * std::pow(a, p - 1.0) * q[j];
  }
  return n;
}

std::vector<double> residual_vector(const std::vector<double>& q, const RadialLaplacian& lap,
                                    const std::vector<double>& rb, double p) {
  std::vector<double> res = lap.apply(q);
  const auto nq = nonlinearity(q, rb, p);
  for (std::size_t j = 0; j < q.size(); ++j) res[j] += nq[j] - q[j];
  return res;
}

void check_profile_shape(const std::vector<double>& q) {
  const double peak = *std::max_element(q.begin(), q.end());
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (!(q[j] > 0.0)) {
      throw SolverError("ground state is not positive at node " + std::to_string(j));
    }
    if (j > 0 && q[j] > q[j - 1] + 1e-13 * peak) {
      throw SolverError("ground state is not radially non-increasing at node " +
                        std::to_string(j));
    }
  }
}

std::vector<double> petviashvili(const ModelParams& params, const RadialGrid& grid,
                                 const GroundStateOptions& opt, int& iterations) {
  const std::size_t n = grid.size();
  const RadialLaplacian lap(grid);
  const auto w = grid.weights();
  const auto r = grid.nodes();
  const auto rb = inverse_power_table(grid, params.b());
  const double p = params.p();
  const double gamma = p / (p - 1.0);

  // L = I - Lap_h, an M-matrix; its inverse preserves positivity.
  std::vector<double> lo(n), di(n), up(n);
  for (std::size_t j = 0; j < n; ++j) {
    lo[j] = -lap.lower[j];
    di[j] = 1.0 - lap.diag[j];
    up[j] = -lap.upper[j];
  }
  auto apply_L = [&](const std::vector<double>& v) {
    std::vector<double> out = lap.apply(v);
    for (std::size_t j = 0; j < n; ++j) out[j] = v[j] - out[j];
    return out;
  };

  std::vector<double> q(n);
  for (std::size_t j = 0; j < n; ++j) q[j] = opt.initial_amplitude * std::exp(-r[j] * r[j]);

  std::vector<double> scratch;
  double last_residual = NAN;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const auto nq = nonlinearity(q, rb, p);
    const double num = weighted_dot(w, q, apply_L(q));
    const double den = weighted_dot(w, q, nq);
    if (!(den > 0.0) || !std::isfinite(num)) {
      throw SolverError("fixed-point iteration degenerated (stabilizing factor undefined)");
    }
    const double factor = std::pow(num / den, gamma);
    std::vector<double> next = nq;
    solve_tridiagonal<double>(lo, di, up, next, scratch);
    for (auto& v : next) v *= factor;

    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) diff += w[j] * (next[j] - q[j]) * (next[j] - q[j]);
    const double norm_next = weighted_norm(w, next);
    if (!(norm_next > 0.0) || !std::isfinite(norm_next)) {
      throw SolverError("fixed-point iteration collapsed to zero or diverged");
    }
    const double change = std::sqrt(diff) / norm_next;
    q = std::move(next);

    if (change < opt.change_tolerance) {
      last_residual = weighted_norm(w, residual_vector(q, lap, rb, p));
      if (last_residual < opt.residual_tolerance * norm_next) {
        iterations = it;
        return q;
      }
    } else if (it % 64 == 0) {
      last_residual = weighted_norm(w, residual_vector(q, lap, rb, p));
    }
  }
  throw IterationLimitError("ground-state iteration did not converge within " +
                                std::to_string(opt.max_iterations) + " iterations",
                            last_residual);
}

// Radial ODE Q'' = -(N-1)/r Q' + Q - r^{-b} |Q|^{p-1} Q integrated outward
// from the first node with a near-origin series start.
struct ShotResult {
  enum Outcome { overshoot, undershoot, undecided } outcome;
  std::vector<double> values;  // node values up to `valid` (exclusive)
  std::size_t valid;
};

ShotResult shoot(double a, const ModelParams& params, const RadialGrid& grid) {
  const int N = params.dimension();
  const double b = params.b();
  const double p = params.p();
  const double dr = grid.dr();
  const std::size_t n = grid.size();
  const double h = dr / 4.0;

  auto rhs = [&](double r, double q, double dq, double& ddq) {
    const double nl = std::pow(r, -b) * std::pow(std::abs(q), p - 1.0) * q;
    ddq = -(N - 1) / r * dq + q - nl;
  };

  const double r0 = grid.node(0);
  const double ap = std::pow(a, p);
  double q = a - ap * std::pow(r0, 2.0 - b) / ((2.0 - b) * (N - b)) + a * r0 * r0 / (2.0 * N);
  double dq = -ap * std::pow(r0, 1.0 - b) / (N - b) + a * r0 / N;

  ShotResult res{ShotResult::undecided, std::vector<double>(n, 0.0), 0};
  res.values[0] = q;
  double r = r0;
  for (std::size_t j = 1; j < n; ++j) {
    for (int s = 0; s < 4; ++s) {
      double k1, k2, k3, k4;
      rhs(r, q, dq, k1);
      rhs(r + 0.5 * h, q + 0.5 * h * dq, dq + 0.5 * h * k1, k2);
      rhs(r + 0.5 * h, q + 0.5 * h * (dq + 0.5 * h * k1), dq + 0.5 * h * k2, k3);
      rhs(r + h, q + h * (dq + 0.5 * h * k2), dq + h * k3, k4);
      const double q1 = q + h * dq + h * h / 6.0 * (k1 + k2 + k3);
      const double dq1 = dq + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      q = q1;
      dq = dq1;
      r += h;
      if (q < 0.0) {
        res.outcome = ShotResult::overshoot;
        res.valid = j;
        return res;
      }
      if (dq > 0.0) {
        res.outcome = ShotResult::undershoot;
        res.valid = j;
        return res;
      }
    }
    r = grid.node(j);
    res.values[j] = q;
  }
  res.valid = n;
  return res;
}

std::vector<double> shooting(const ModelParams& params, const RadialGrid& grid, int& iterations) {
  double lo = 0.0, hi = 1.0;
  int evals = 0;
  // Expand until [lo, hi] brackets the transition undershoot -> overshoot.
  while (true) {
    const auto s = shoot(hi, params, grid);
    ++evals;
    if (s.outcome == ShotResult::overshoot) break;
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw SolverError("shooting: no overshooting amplitude found");
  }
  ShotResult best = shoot(lo > 0.0 ? lo : hi * 1e-3, params, grid);
  for (int k = 0; k < 200 && hi - lo > 4e-16 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    auto s = shoot(mid, params, grid);
    ++evals;
    if (s.outcome == ShotResult::overshoot) {
      hi = mid;
    } else {
      lo = mid;
      best = std::move(s);
    }
  }
  iterations = evals;

  // Keep the undershooting trajectory up to where it departs, then continue
  // with the decaying linear tail r^{-(N-1)/2} e^{-r}.
  std::vector<double> q = best.values;
  std::size_t keep = best.valid;
  if (keep < 2) throw SolverError("shooting: trajectory left the admissible set immediately");
  // Back off to where the solution is still strictly decreasing.
  while (keep > 2 && q[keep - 1] >= q[keep - 2]) --keep;
  const int N = params.dimension();
  const double rs = grid.node(keep - 1);
  const double qs = q[keep - 1];
  for (std::size_t j = keep; j < grid.size(); ++j) {
    const double r = grid.node(j);
    q[j] = qs * std::pow(rs / r, 0.5 * (N - 1)) * std::exp(-(r - rs));
  }
  return q;
}

}  // namespace

double elliptic_residual(const FieldState& q, const ModelParams& params) {
  const RadialGrid& g = q.grid();
  const RadialLaplacian lap(g);
  std::vector<Complex> lq(q.size());
  lap.apply(q.values(), lq);
  const auto rb = inverse_power_table(g, params.b());
  const auto w = g.weights();
  double s = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double a = std::abs(q[j]);
    const Complex nl = rb[j] * std::pow(a, params.p() - 1.0) * q[j];
    s += w[j] * std::norm(lq[j] + nl - q[j]);
  }
  return std::sqrt(s);
}

Thresholds threshold_quantities(const GroundState& gs, const ModelParams& params) {
  const double sc = params.critical_regularity();
  const double norm_Q = std::sqrt(gs.mass_Q);
  if (std::abs(sc) <= kCriticalTolerance) return {gs.mass_Q, norm_Q};
  if (std::abs(sc - 1.0) <= kCriticalTolerance) return {gs.energy_Q, gs.grad_Q};
  if (!(gs.energy_Q > 0.0)) {
    throw SolverError("threshold undefined: E(Q) = " + std::to_string(gs.energy_Q) +
                      " is not positive for s_c = " + std::to_string(sc));
  }
  return {std::pow(gs.energy_Q, sc) * std::pow(gs.mass_Q, 1.0 - sc),
          std::pow(gs.grad_Q, sc) * std::pow(norm_Q, 1.0 - sc)};
}

GroundState make_ground_state(const ModelParams& params, FieldState profile,
                              GroundStateMethod method, int iterations) {
  const FieldSummary s = summarize(profile, params);
  GroundState gs{params, std::move(profile), 0.0, 0.0, 0.0, std::nullopt, std::nullopt};
  gs.mass_Q = s.mass;
  gs.energy_Q = s.energy;
  gs.grad_Q = std::sqrt(s.gradient_norm_sq);
  gs.residual = elliptic_residual(gs.profile, params);
  gs.pohozaev_defect = s.k / s.gradient_norm_sq;
  gs.method = method;
  gs.iterations = iterations;
  const double sc = params.critical_regularity();
  if (std::abs(sc) <= kCriticalTolerance || gs.energy_Q > 0.0) {
    const Thresholds t = threshold_quantities(gs, params);
    gs.threshold_EM = t.em;
    gs.threshold_GM = t.gm;
  }
  return gs;
}

GroundState solve_ground_state(const ModelParams& params, GridPtr grid,
                               const GroundStateOptions& options) {
  params.require_energy_subcritical();
  if (!grid) throw ValidationError("solve_ground_state: null grid");
  if (grid->dimension() != params.dimension()) {
    throw ValidationError("grid dimension does not match N");
  }
  if (grid->size() < options.min_cells) {
    throw ValidationError("ground state needs at least " + std::to_string(options.min_cells) +
                          " cells");
  }

  int iterations = 0;
  std::vector<double> q = options.method == GroundStateMethod::shooting
                              ? shooting(params, *grid, iterations)
                              : petviashvili(params, *grid, options, iterations);
  check_profile_shape(q);
  GroundState gs = make_ground_state(params, FieldState::from_real(grid, q), options.method,
                                     iterations);
  if (params.intercritical() && !gs.threshold_EM) {
    throw SolverError("intercritical ground state with non-positive energy");
  }
  return gs;
}

void write_profile(const GroundState& gs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write profile " + path.string());
  const RadialGrid& g = gs.profile.grid();
  char buf[128];
  auto kv = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "# %s = %.17g\n", key, v);
    out << buf;
  };
  out << "# N = " << gs.params.dimension() << "\n";
  kv("b", gs.params.b());
  kv("p", gs.params.p());
  kv("r_max", g.r_max());
  out << "# M = " << g.size() << "\n";
  kv("mass_Q", gs.mass_Q);
  kv("energy_Q", gs.energy_Q);
  kv("grad_Q", gs.grad_Q);
  kv("residual", gs.residual);
  out << "# method = " << to_string(gs.method) << "\n";
  out << "# iterations = " << gs.iterations << "\n";
  out << "r,value\n";
  for (std::size_t j = 0; j < g.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", g.node(j), gs.profile[j].real());
    out << buf;
  }
  if (!out) throw IoError("failed writing profile " + path.string());
}

GroundState read_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read profile " + path.string());
  std::map<std::string, std::string> header;
  std::vector<double> values;
  std::string line;
  bool columns = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
      };
      header[trim(line.substr(1, eq - 1))] = trim(line.substr(eq + 1));
      continue;
    }
    if (!columns) {
      if (line.rfind("r,value", 0) != 0) throw IoError("profile: missing 'r,value' header");
      columns = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError("profile: malformed row '" + line + "'");
    try {
      values.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw IoError("profile: malformed value in row '" + line + "'");
    }
  }
  auto need = [&](const char* key) -> const std::string& {
    const auto it = header.find(key);
    if (it == header.end()) throw IoError(std::string("profile: missing header key ") + key);
    return it->second;
  };
  try {
    const ModelParams params(std::stoi(need("N")), std::stod(need("b")), std::stod(need("p")));
    const double r_max = std::stod(need("r_max"));
    const auto M = static_cast<std::size_t>(std::stoul(need("M")));
    if (values.size() != M) throw IoError("profile: row count does not match M");
    const int iters = header.count("iterations") ? std::stoi(header["iterations"]) : 0;
    const GroundStateMethod method = header.count("method")
                                         ? parse_ground_state_method(header["method"])
                                         : GroundStateMethod::fixed_point_renormalization;
    auto grid = RadialGrid::make(params.dimension(), r_max, M);
    return make_ground_state(params, FieldState::from_real(grid, values), method, iters);
  } catch (const std::invalid_argument&) {
    throw IoError("profile: malformed header value");
  } catch (const std::out_of_range&) {
    throw IoError("profile: header value out of range");
  }
}

}  // namespace inls
