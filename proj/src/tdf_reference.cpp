#include "atdf/tdf_reference.hpp"

#include <cmath>

#include "atdf/error.hpp"

namespace atdf {

ShapedReference shape(const PiecewiseConstantSignal& reference, const ShaperDesign& design) {
  std::vector<SignalEvent> increments;
  increments.reserve(reference.events().size() * design.impulses.size());
  double previous = reference.initial_level();
  for (const auto& e : reference.events()) {
    const double delta = e.level - previous;
    previous = e.level;
    for (const auto& imp : design.impulses) {
      increments.push_back({e.time + imp.time, delta * imp.amplitude});
    }
  }
  ShapedReference out;
  out.signal = signal_from_increments(reference.initial_level(), std::move(increments));
  out.design = design;
  out.estimation_end = design.tau;
  return out;
}

PiecewiseConstantSignal estimation_prefix(double reference_level, double K, double tau) {
  if (!(std::isfinite(tau) && tau > 0.0)) {
    throw Error(Errc::InvalidArgument, "estimation duration must be > 0");
  }
  if (reference_level == 0.0) return PiecewiseConstantSignal(0.0);
  return PiecewiseConstantSignal(0.0, {{0.0, K * reference_level}});
}

}  // namespace atdf
