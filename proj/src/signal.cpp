#include "atdf/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "atdf/error.hpp"

namespace atdf {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidTimestep: return "InvalidTimestep";
    case Errc::WindowTooShort: return "WindowTooShort";
    case Errc::NonPositiveSteadyState: return "NonPositiveSteadyState";
    case Errc::AmbiguousResponse: return "AmbiguousResponse";
    case Errc::DegenerateOvershoot: return "DegenerateOvershoot";
    case Errc::DegeneratePhase: return "DegeneratePhase";
    case Errc::NoRealRoots: return "NoRealRoots";
    case Errc::DegenerateDenominator: return "DegenerateDenominator";
    case Errc::NoValidDesign: return "NoValidDesign";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

PiecewiseConstantSignal::PiecewiseConstantSignal(double initial_level,
                                                 std::vector<SignalEvent> events)
    : initial_level_(initial_level), events_(std::move(events)) {
  if (!std::isfinite(initial_level_)) {
    throw Error(Errc::InvalidArgument, "signal initial level must be finite");
  }
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const auto& e = events_[i];
    if (!std::isfinite(e.time) || !std::isfinite(e.level) || e.time < 0.0) {
      throw Error(Errc::InvalidArgument,
                  "signal event " + std::to_string(i) + " must have finite time >= 0 and level");
    }
    if (i > 0 && !(e.time > events_[i - 1].time)) {
      throw Error(Errc::InvalidArgument, "signal event times must be strictly increasing");
    }
  }
}

PiecewiseConstantSignal PiecewiseConstantSignal::step(double level, double at) {
  return PiecewiseConstantSignal(0.0, {{at, level}});
}

double PiecewiseConstantSignal::level_at(double t) const noexcept {
  // first event strictly after t
  auto it = std::upper_bound(events_.begin(), events_.end(), t,
                             [](double v, const SignalEvent& e) { return v < e.time; });
  if (it == events_.begin()) return initial_level_;
  return std::prev(it)->level;
}

double PiecewiseConstantSignal::final_level() const noexcept {
  return events_.empty() ? initial_level_ : events_.back().level;
}

PiecewiseConstantSignal PiecewiseConstantSignal::scaled(double factor) const {
  auto events = events_;
  for (auto& e : events) e.level *= factor;
  return PiecewiseConstantSignal(initial_level_ * factor, std::move(events));
}

namespace {

std::vector<SignalEvent> increments_of(const PiecewiseConstantSignal& s) {
  std::vector<SignalEvent> out;
  out.reserve(s.events().size());
  double previous = s.initial_level();
  for (const auto& e : s.events()) {
    out.push_back({e.time, e.level - previous});
    previous = e.level;
  }
  return out;
}

}  // namespace

PiecewiseConstantSignal operator+(const PiecewiseConstantSignal& a,
                                  const PiecewiseConstantSignal& b) {
  auto inc = increments_of(a);
  auto more = increments_of(b);
  inc.insert(inc.end(), more.begin(), more.end());
  return signal_from_increments(a.initial_level() + b.initial_level(), std::move(inc));
}

PiecewiseConstantSignal signal_from_increments(double initial_level,
                                               std::vector<SignalEvent> increments) {
  std::stable_sort(increments.begin(), increments.end(),
                   [](const SignalEvent& x, const SignalEvent& y) { return x.time < y.time; });
  std::vector<SignalEvent> events;
  events.reserve(increments.size());
  double level = initial_level;
  std::size_t i = 0;
  while (i < increments.size()) {
    const double t = increments[i].time;
    double delta = 0.0;
    for (; i < increments.size() && increments[i].time == t; ++i) delta += increments[i].level;
    if (delta == 0.0) continue;
    level += delta;
    events.push_back({t, level});
  }
  return PiecewiseConstantSignal(initial_level, std::move(events));
}

}  // namespace atdf
