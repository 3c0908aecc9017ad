#pragma once

#include <optional>
#include <string>
#include <vector>

#include "atdf/estimator.hpp"
#include "atdf/lti_sim.hpp"
#include "atdf/shaper_design.hpp"
#include "atdf/tdf_reference.hpp"

namespace atdf {

struct RunMetrics {
  double residual_vibration = 0.0;  ///< max |x - target| / |step| after the last impulse + margin
  double overshoot = 0.0;           ///< max overshoot / |step| after the last impulse
  double settle_error = 0.0;        ///< |x(t_end) - target| / |step|
};

/// Metrics of one reference level change (step-wise references).
struct TransitionMetrics {
  double time = 0.0;          ///< raw reference change
  double level = 0.0;         ///< level commanded from `time` on
  double step = 0.0;          ///< signed change
  double judged_from = 0.0;   ///< start of the residual window
  double judged_until = 0.0;  ///< end of the residual window
  RunMetrics metrics;
};

struct RunResult {
  Estimate estimate;
  ResponseFeatures features;
  ShaperDesign design;
  PiecewiseConstantSignal reference;
  ShapedReference shaped;
  TimeSeries response;
  RunMetrics metrics;
  std::vector<TransitionMetrics> transitions;
  double estimation_end = 0.0;
  std::size_t estimation_samples = 0;  ///< samples 0 .. estimation_samples-1 form the window
  bool identified_from_probe = false;
};

/// max |x(t) - target| over samples with t >= t_after, divided by |step|.
/// Returns 0 when no sample lies after t_after.
double residual_vibration(const TimeSeries& response, double target, double t_after,
                          double step);

/// Time after the last impulse before residual vibration is judged:
/// 2% of the natural period plus two samples.
double residual_margin(double omega_n, double dt) noexcept;

struct AdaptiveOptions {
  std::optional<double> t_end;  ///< default: last change + tau + 2T + 10 periods
  /// Identify from a separate calibration step of this length instead of the
  /// run's own estimation window.
  std::optional<double> probe_window;
};

/// Estimation phase -> identification -> design -> shaped tracking, on one
/// continuous trajectory. The plant is only reachable through its samples.
RunResult run_adaptive(const PlantParams& plant, const PiecewiseConstantSignal& reference,
                       const ShaperConfig& config, double dt, const AdaptiveOptions& options = {});

struct BaselineComparison {
  RunResult adaptive;
  RunResult fixed;
};

/// Proposed shaper vs. the fixed-estimation-time baseline on a unit step.
/// Baseline impulses scheduled before tau fire at tau.
BaselineComparison run_baseline_comparison(const PlantParams& plant, const ShaperConfig& config,
                                           double dt, const AdaptiveOptions& options = {});

/// Unit step driven straight into the plant (no shaping), judged like a run.
RunResult run_unshaped(const PlantParams& plant, double dt, double t_end);

struct SweepRow {
  double zeta = 0.0;
  double omega_n = 0.0;
  double tau = 0.0;
  double K = 0.0;
  double zeta_hat = 0.0;
  double omega_n_hat = 0.0;
  double A = 0.0;
  double T = 0.0;
  double residual_vibration = 0.0;
  double dt = 0.0;
  std::string error;  ///< empty on success; numeric fields NaN otherwise
};

struct Table1Options {
  std::optional<double> dt_fine;  ///< default: per-row default_timestep(omega_n)
  double dt_coarse = 1e-4;
  double K = 0.01;
};

/// The 12 estimation scenarios (zeta, wn, tau sweeps) at fine resolution,
/// followed by the 300 pi and 3000 pi rows at dt_coarse.
std::vector<SweepRow> table1_experiment(const Table1Options& options = {});

/// Designs (A, T) for every grid cell from the true parameters and judges
/// the shaped unit step on the true plant. Cells run in parallel.
std::vector<SweepRow> sweep_AT(const std::vector<double>& zeta_grid,
                               const std::vector<double>& omega_grid, const ShaperConfig& config);

/// run_adaptive on a multi-level schedule with per-transition metrics.
RunResult stepwise_experiment(const PlantParams& plant, const ShaperConfig& config,
                              const PiecewiseConstantSignal& schedule, double dt,
                              const AdaptiveOptions& options = {});

}  // namespace atdf
