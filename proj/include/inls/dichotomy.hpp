#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "inls/evolution.hpp"
#include "inls/field.hpp"
#include "inls/ground_state.hpp"
#include "inls/params.hpp"

namespace inls {

struct Criticality {
  double s_c = 0.0;
  double alpha = 0.0;
  std::optional<double> rate_exponent;  // b / (2 alpha - 2), empty for alpha <= 1
  Regime regime = Regime::out_of_theorem;
};

Criticality compute_criticality(const ModelParams& params);

enum class Prediction { finite_time_blowup, finite_or_infinite_blowup_with_rate, no_prediction };

std::string to_string(Prediction p);

// Relative margin below which a threshold comparison counts as an equality.
inline constexpr double kThresholdTolerance = 1e-9;

struct DichotomyVerdict {
  double s_c = 0.0;
  double alpha = 0.0;
  Regime regime = Regime::out_of_theorem;

  // E^{s_c} M^{1-s_c} of the data against the ground state; the comparison
  // wants value < threshold. margin = threshold - value.
  double value_EM = 0.0;
  double threshold_EM = 0.0;
  double margin_EM = 0.0;
  bool cond_EM_satisfied = false;
  // E(u0) <= 0 counts as satisfying the energy condition.
  bool negative_energy_shortcut = false;

  // ||grad u||^{s_c} ||u||^{1-s_c}; wants value > threshold.
  // margin = value - threshold.
  double value_GM = 0.0;
  double threshold_GM = 0.0;
  double margin_GM = 0.0;
  bool cond_GM_satisfied = false;

  Prediction predicted = Prediction::no_prediction;
};

// Throws ValidationError if gs was computed for other parameters or on
// another dimension.
DichotomyVerdict classify(const FieldState& u0, const ModelParams& params, const GroundState& gs);

struct OdeOptions {
  double tail_fraction = 0.5;
  // |I'| below noise_factor R ||grad u|| ||u|| is treated as sign noise.
  double noise_factor = 1e-8;
  std::size_t min_samples = 10;
};

struct OdeCheck {
  std::optional<std::size_t> T0_index;
  std::optional<double> T0;
  std::vector<double> times;     // from T0 on
  std::vector<double> f_series;  // f(t) = int_{T0}^t ||grad u||^2
  double ode_constant = 0.0;     // max over the tail of f^2 / f'
  // T0 found and I non-increasing from T0 on.
  bool monotone = false;
};

// Throws ValidationError for fewer than min_samples records or records
// without the I' column.
OdeCheck ode_mechanism_check(const std::vector<TimeSeriesRecord>& series,
                             const OdeOptions& options = {});

struct RateReport {
  std::vector<double> times;
  std::vector<double> sup_grad;
  std::vector<double> R_of_T;
  double expected_exponent = 0.0;  // b / (2 alpha - 2)
  double fitted_exponent = 0.0;    // tail least squares of log sup_grad vs log T
  double min_ratio = 0.0;          // min_k R(T_k) / T_k
  std::size_t tail_start = 0;
  // Present when the series carries I'.
  std::optional<OdeCheck> ode;
};

// Throws ValidationError for alpha <= 1, b = 0, or fewer than two positive
// times.
RateReport rate_report(const std::vector<TimeSeriesRecord>& series, const ModelParams& params,
                       const OdeOptions& options = {});

// inf_t delta_instant over the series (empirical delta_0).
double empirical_delta0(const std::vector<TimeSeriesRecord>& series);

// Fixed radius for the case-1 argument: the smallest R with
// R^{-b} g^{2 alpha - 2} <= (delta0 / 2) (8 / constant), where g is the
// gradient norm that maximizes g^{2 alpha - 2} over the run.
double case1_radius(double delta0, double g, const ModelParams& params, double constant = 8.0);

struct Case1Monitor {
  std::size_t samples = 0;
  std::size_t violations = 0;  // records with I'' > -4 delta0 ||grad u||^2
  double worst = 0.0;          // max of (I'' + 4 delta0 G) / (4 delta0 G); <= 0 when it holds
};

Case1Monitor case1_inequality_check(const std::vector<TimeSeriesRecord>& series, double delta0);

}  // namespace inls
