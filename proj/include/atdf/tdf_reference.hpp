#pragma once

#include "atdf/shaper_design.hpp"
#include "atdf/signal.hpp"

namespace atdf {

struct ShapedReference {
  PiecewiseConstantSignal signal;
  ShaperDesign design;
  double estimation_end = 0.0;
};

/// Convolves the reference with the impulse train of `design`: every level
/// change of the reference spawns one scaled change per impulse.
ShapedReference shape(const PiecewiseConstantSignal& reference, const ShaperDesign& design);

/// K * level held from t = 0: the command applied while estimating. The first
/// shaper impulse continues it until tau + T.
PiecewiseConstantSignal estimation_prefix(double reference_level, double K, double tau);

}  // namespace atdf
