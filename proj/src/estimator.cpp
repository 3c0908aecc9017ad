#include "atdf/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "atdf/error.hpp"

namespace atdf {

std::string_view to_string(DampingClass c) noexcept {
  switch (c) {
    case DampingClass::Undamped: return "Undamped";
    case DampingClass::Underdamped: return "Underdamped";
    case DampingClass::CriticallyDamped: return "CriticallyDamped";
  }
  return "Unknown";
}

namespace {

using namespace estimator_tuning;

// Vertex of the parabola through samples j-1, j, j+1 (offset in samples).
Extremum refine(const std::vector<double>& y, std::size_t j, double dt) {
  const double left = y[j - 1];
  const double mid = y[j];
  const double right = y[j + 1];
  const double curvature = left - 2.0 * mid + right;
  double offset = 0.0;
  if (curvature != 0.0) offset = std::clamp(0.5 * (left - right) / curvature, -1.0, 1.0);
  const double value = mid - 0.25 * (left - right) * offset;
  return {(static_cast<double>(j) + offset) * dt, value};
}

int slope_sign(double diff) {
  if (diff > kSlopeTolerance) return 1;
  if (diff < -kSlopeTolerance) return -1;
  return 0;
}

}  // namespace

ResponseFeatures extract_features(const TimeSeries& response, double step_amplitude) {
  if (!(std::isfinite(step_amplitude) && step_amplitude != 0.0)) {
    throw Error(Errc::InvalidArgument, "step amplitude must be finite and nonzero");
  }
  if (!(response.dt > 0.0) || response.size() < 3) {
    throw Error(Errc::WindowTooShort, "estimation window holds fewer than 3 samples");
  }
  const std::size_t n = response.size();
  const double dt = response.dt;

  // Work on the response normalized by the commanded step; all features
  // below are ratios or times, so the scale only comes back in the output.
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) y[k] = response.samples[k] / step_amplitude;

  ResponseFeatures f;
  f.step_amplitude = step_amplitude;
  f.window = static_cast<double>(n - 1) * dt;
  f.x_start = response.samples.front();

  // Steady state: tail mean if the final 10% is flat, else the commanded level.
  const std::size_t tail = std::max<std::size_t>(2, static_cast<std::size_t>(
                                                        std::ceil(kTailFraction * static_cast<double>(n))));
  const auto tail_begin = y.end() - static_cast<std::ptrdiff_t>(tail);
  const auto [lo, hi] = std::minmax_element(tail_begin, y.end());
  double y_inf = 1.0;
  if (*hi - *lo <= kTailSpread) {
    y_inf = std::accumulate(tail_begin, y.end(), 0.0) / static_cast<double>(tail);
    f.x_inf_from_tail = true;
  }
  if (!(y_inf > 0.0)) {
    throw Error(Errc::NonPositiveSteadyState,
                "steady-state estimate has the opposite sign of the commanded step");
  }
  f.x_inf = y_inf * step_amplitude;

  // Interior extrema from sign changes of the discrete slope; flat
  // differences keep the previous sign.
  int prev_sign = 0;
  std::size_t prev_diff = 0;
  std::size_t first_peak_index = 0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const int s = slope_sign(y[k + 1] - y[k]);
    if (s == 0) continue;
    if (prev_sign != 0 && s != prev_sign) {
      const auto begin = y.begin() + static_cast<std::ptrdiff_t>(prev_diff + 1);
      const auto end = y.begin() + static_cast<std::ptrdiff_t>(k + 1);
      const bool is_peak = prev_sign > 0;
      const auto it = is_peak ? std::max_element(begin, end) : std::min_element(begin, end);
      const auto j = static_cast<std::size_t>(it - y.begin());
      Extremum e = refine(y, j, dt);
      e.value *= step_amplitude;
      if (is_peak) {
        if (f.peaks.empty()) first_peak_index = j;
        f.peaks.push_back(e);
      } else {
        f.troughs.push_back(e);
      }
    }
    prev_sign = s;
    prev_diff = k;
  }
  f.monotone = f.peaks.empty() && f.troughs.empty();

  double y_max = *std::max_element(y.begin(), y.end());
  for (const auto& p : f.peaks) y_max = std::max(y_max, p.value / step_amplitude);
  f.overshoot = std::max(0.0, (y_max - y_inf) / y_inf);

  if (!f.peaks.empty()) {
    f.peak_time = f.peaks.front().time;
    if (f.peaks.size() >= 2) {
      f.peak_interval =
          (f.peaks.back().time - f.peaks.front().time) / static_cast<double>(f.peaks.size() - 1);
    } else {
      const auto next_trough = std::find_if(f.troughs.begin(), f.troughs.end(), [&](const Extremum& t) {
        return t.time > f.peak_time;
      });
      // The step starts from rest, which is the trough preceding the first peak.
      f.peak_interval = next_trough != f.troughs.end() ? 2.0 * (next_trough->time - f.peak_time)
                                                       : 2.0 * f.peak_time;
    }
    f.returned_after_peak = std::any_of(y.begin() + static_cast<std::ptrdiff_t>(first_peak_index), y.end(),
                                        [&](double v) { return v < y_inf; });
  }

  // 2% band: first time after which the response stays inside.
  const double band = kSettlingBand * y_inf;
  std::size_t last_out = n;
  for (std::size_t k = n; k-- > 0;) {
    if (std::abs(y[k] - y_inf) > band) {
      last_out = k;
      break;
    }
  }
  if (last_out == n) {
    f.settling_time = 0.0;
  } else if (last_out + 1 < n) {
    const double out_dev = std::abs(y[last_out] - y_inf);
    const double in_dev = std::abs(y[last_out + 1] - y_inf);
    const double frac = out_dev > in_dev ? (out_dev - band) / (out_dev - in_dev) : 0.0;
    f.settling_time = (static_cast<double>(last_out) + frac) * dt;
  }

  const bool trough_after_peak = !f.peaks.empty() && std::any_of(f.troughs.begin(), f.troughs.end(),
                                                                 [&](const Extremum& t) {
                                                                   return t.time > f.peak_time;
                                                                 });
  const bool full_cycle = f.peaks.size() >= 2 || trough_after_peak ||
                          (!f.peaks.empty() && f.window >= 2.0 * f.peak_time - 1.5 * dt);
  if (!f.settling_time && !full_cycle) {
    throw Error(Errc::WindowTooShort,
                "the estimation window ends before the response settles or completes one "
                "oscillation cycle; choose a longer estimation time");
  }
  return f;
}

DampingClass classify(const ResponseFeatures& f) {
  if (f.monotone) return DampingClass::CriticallyDamped;
  if (f.peaks.empty()) {
    // Only a dip: not a step response of the plant family.
    throw Error(Errc::AmbiguousResponse, "response has troughs but no peak");
  }
  if (f.peaks.size() == 1 && !f.settling_time && !f.returned_after_peak) {
    throw Error(Errc::AmbiguousResponse,
                "a single peak, no settling and no return below steady state: cannot tell "
                "undamped from underdamped");
  }

  // Successive excursions about x_inf; the rest start is the first one.
  std::vector<Extremum> extrema = f.peaks;
  extrema.insert(extrema.end(), f.troughs.begin(), f.troughs.end());
  std::sort(extrema.begin(), extrema.end(),
            [](const Extremum& a, const Extremum& b) { return a.time < b.time; });
  const double scale = std::abs(f.x_inf);
  double lo = std::abs(f.x_inf - f.x_start) / scale;
  double hi = lo;
  for (const auto& e : extrema) {
    const double dev = std::abs(e.value - f.x_inf) / scale;
    lo = std::min(lo, dev);
    hi = std::max(hi, dev);
  }
  if (hi > 0.0 && hi - lo <= kEqualPeakTolerance * hi) return DampingClass::Undamped;
  return DampingClass::Underdamped;
}

Estimate estimate(const ResponseFeatures& f, DampingClass damping) {
  Estimate e;
  e.damping = damping;
  e.steady_state_assumed = !f.x_inf_from_tail;
  switch (damping) {
    case DampingClass::CriticallyDamped:
      if (!f.settling_time || !(*f.settling_time > 0.0)) {
        throw Error(Errc::InvalidArgument, "critically damped estimate needs a settling time");
      }
      e.zeta_hat = 1.0;
      e.omega_n_hat = 4.0 / (e.zeta_hat * *f.settling_time);
      break;
    case DampingClass::Undamped:
      if (!(f.peak_interval > 0.0)) {
        throw Error(Errc::InvalidArgument, "undamped estimate needs a peak interval");
      }
      e.zeta_hat = 0.0;
      e.omega_n_hat = 2.0 * std::numbers::pi / f.peak_interval;
      break;
    case DampingClass::Underdamped: {
      if (!(f.overshoot > 0.0)) {
        throw Error(Errc::DegenerateOvershoot, "underdamped branch needs Mp > 0");
      }
      if (!(f.peak_time > 0.0)) {
        throw Error(Errc::InvalidArgument, "underdamped estimate needs a peak time");
      }
      const double log_mp = std::log(f.overshoot);
      const double pi = std::numbers::pi;
      e.zeta_hat = std::clamp(-log_mp / std::sqrt(pi * pi + log_mp * log_mp), 0.0, 1.0);
      e.omega_n_hat = pi / (f.peak_time * std::sqrt(1.0 - e.zeta_hat * e.zeta_hat));
      break;
    }
  }
  return e;
}

Estimate identify(const TimeSeries& response, double step_amplitude) {
  const ResponseFeatures f = extract_features(response, step_amplitude);
  return estimate(f, classify(f));
}

}  // namespace atdf
