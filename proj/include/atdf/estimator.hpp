#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "atdf/signal.hpp"

namespace atdf {

/// Refined local extremum of a sampled response.
struct Extremum {
  double time;
  double value;
};

/// Transient features of a step response recorded during the estimation
/// window. Times are measured from the first sample (the step instant).
struct ResponseFeatures {
  std::vector<Extremum> peaks;    ///< interior maxima, time ascending
  std::vector<Extremum> troughs;  ///< interior minima, time ascending
  double step_amplitude = 0.0;
  double x_start = 0.0;           ///< response at the step instant
  double x_inf = 0.0;             ///< steady-state estimate
  bool x_inf_from_tail = false;   ///< false: fell back to the commanded level
  double overshoot = 0.0;         ///< Mp, clipped at 0
  double peak_time = 0.0;         ///< T_Mp, time of the first peak (0 when none)
  std::optional<double> settling_time;  ///< 2% band entry; empty if never settled in the window
  double peak_interval = 0.0;     ///< mean peak-to-peak interval (0 when no peak)
  bool monotone = true;
  bool returned_after_peak = false;  ///< response fell back below x_inf after the first peak
  double window = 0.0;            ///< duration covered by the samples
};

enum class DampingClass { Undamped, Underdamped, CriticallyDamped };

std::string_view to_string(DampingClass c) noexcept;

struct Estimate {
  double zeta_hat = 0.0;
  double omega_n_hat = 0.0;
  DampingClass damping = DampingClass::Underdamped;
  /// Copied from the features: true when x_inf fell back to the commanded level.
  bool steady_state_assumed = false;
};

namespace estimator_tuning {
inline constexpr double kSettlingBand = 0.02;
inline constexpr double kTailFraction = 0.10;
inline constexpr double kTailSpread = 0.005;
/// Per-sample difference below kSlopeTolerance * |amplitude| counts as flat.
inline constexpr double kSlopeTolerance = 1e-9;
inline constexpr double kEqualPeakTolerance = 1e-6;
}  // namespace estimator_tuning

/// Throws WindowTooShort when the samples neither settle into the 2% band
/// nor cover a full oscillation cycle (rest -> first peak -> next trough),
/// and NonPositiveSteadyState when x_inf has the wrong sign.
ResponseFeatures extract_features(const TimeSeries& response, double step_amplitude);

/// Monotone -> CriticallyDamped; equal successive excursions about x_inf
/// (the rest start counts as the first) -> Undamped; otherwise Underdamped.
/// Throws AmbiguousResponse for a single unsettled peak that was never
/// followed by a return below x_inf.
DampingClass classify(const ResponseFeatures& features);

/// Throws DegenerateOvershoot when the underdamped branch sees Mp <= 0.
Estimate estimate(const ResponseFeatures& features, DampingClass damping);

/// extract_features + classify + estimate.
Estimate identify(const TimeSeries& response, double step_amplitude);

}  // namespace atdf
