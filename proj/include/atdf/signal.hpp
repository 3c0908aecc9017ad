#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace atdf {

/// Level change at `time`; the new level holds until the next event.
struct SignalEvent {
  double time;
  double level;
};

/// Right-continuous piecewise-constant signal. Before the first event the
/// signal sits at `initial_level` (this includes all negative times).
class PiecewiseConstantSignal {
 public:
  PiecewiseConstantSignal() = default;

  /// Throws Errc::InvalidArgument unless event times are finite, >= 0 and
  /// strictly increasing.
  explicit PiecewiseConstantSignal(double initial_level, std::vector<SignalEvent> events = {});

  /// A step from 0 to `level` at t = 0.
  static PiecewiseConstantSignal step(double level, double at = 0.0);

  [[nodiscard]] double initial_level() const noexcept { return initial_level_; }
  [[nodiscard]] std::span<const SignalEvent> events() const noexcept { return events_; }
  [[nodiscard]] bool empty() const noexcept { return events_.empty(); }

  [[nodiscard]] double level_at(double t) const noexcept;
  [[nodiscard]] double final_level() const noexcept;

  [[nodiscard]] PiecewiseConstantSignal scaled(double factor) const;

  /// Pointwise sum. Coincident event times are merged.
  friend PiecewiseConstantSignal operator+(const PiecewiseConstantSignal& a,
                                           const PiecewiseConstantSignal& b);

 private:
  double initial_level_ = 0.0;
  std::vector<SignalEvent> events_;
};

/// Builds a signal from unordered level increments: each (time, delta) pair
/// adds `delta` to the level from `time` on. Coincident times are merged and
/// increments that cancel exactly produce no event.
PiecewiseConstantSignal signal_from_increments(double initial_level,
                                               std::vector<SignalEvent> increments);

/// Uniformly sampled signal; sample k sits at t0 + k * dt.
struct TimeSeries {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<double> samples;

  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
  [[nodiscard]] double time(std::size_t k) const noexcept {
    return t0 + static_cast<double>(k) * dt;
  }
  [[nodiscard]] double end_time() const noexcept {
    return samples.empty() ? t0 : time(samples.size() - 1);
  }
};

}  // namespace atdf
