#include "atdf/lti_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "atdf/error.hpp"

namespace atdf {

namespace {

constexpr double kCriticalBand = 1e-12;

}  // namespace

void PlantParams::validate() const {
  if (!(std::isfinite(zeta) && zeta >= 0.0)) {
    throw Error(Errc::InvalidArgument, "plant zeta must be >= 0");
  }
  if (!(std::isfinite(omega_n) && omega_n > 0.0)) {
    throw Error(Errc::InvalidArgument, "plant omega_n must be > 0");
  }
}

DampingRegime damping_regime(double zeta) noexcept {
  if (zeta == 0.0) return DampingRegime::Undamped;
  if (std::abs(zeta - 1.0) <= kCriticalBand) return DampingRegime::Critical;
  return zeta < 1.0 ? DampingRegime::Underdamped : DampingRegime::Overdamped;
}

double DiscretePlant::spectral_radius() const noexcept {
  const double tr = a11 + a22;
  const double det = a11 * a22 - a12 * a21;
  const double disc = tr * tr / 4.0 - det;
  if (disc >= 0.0) {
    const double r = std::sqrt(disc);
    return std::max(std::abs(tr / 2.0 + r), std::abs(tr / 2.0 - r));
  }
  // complex pair: |lambda|^2 = det
  return std::sqrt(det);
}

DiscretePlant transition(const PlantParams& plant, double h) {
  plant.validate();
  if (!(std::isfinite(h) && h >= 0.0)) {
    throw Error(Errc::InvalidTimestep, "step must be finite and >= 0");
  }
  const double wn = plant.omega_n;
  const double zeta = plant.zeta;
  const double sigma = zeta * wn;
  DiscretePlant d;
  d.dt = h;

  if (damping_regime(zeta) == DampingRegime::Overdamped) {
    // Two real exponentials; e^{-sigma h} cosh(wh h) would overflow
    // separately for long steps.
    const double wh = wn * std::sqrt((zeta - 1.0) * (zeta + 1.0));
    const double slow = std::exp(-(sigma - wh) * h);
    const double fast = std::exp(-(sigma + wh) * h);
    const double ec = 0.5 * (slow + fast);
    const double es = 0.5 * (slow - fast) / wh;
    d.a11 = ec + sigma * es;
    d.a12 = es;
    d.a21 = -wn * wn * es;
    d.a22 = ec - sigma * es;
    d.b1 = 1.0 - d.a11;
    d.b2 = -d.a21;
    return d;
  }

  // Phi = e^{-sigma h} [c + sigma s, s; -wn^2 s, c - sigma s] with
  // (c, s) = (cos wd h, sin(wd h) / wd), or (1, h) when critically damped.
  double c = 1.0;
  double s = h;
  double one_minus_c = 0.0;
  if (damping_regime(zeta) != DampingRegime::Critical) {
    const double wd = wn * std::sqrt((1.0 - zeta) * (1.0 + zeta));
    const double angle = wd * h;
    c = std::cos(angle);
    s = std::sin(angle) / wd;
    const double half = std::sin(angle / 2.0);
    one_minus_c = 2.0 * half * half;
  }

  const double e = std::exp(-sigma * h);
  d.a11 = e * (c + sigma * s);
  d.a12 = e * s;
  d.a21 = -wn * wn * e * s;
  d.a22 = e * (c - sigma * s);
  // Gamma = (I - Phi) [1; 0] because [u; 0] is the equilibrium for input u.
  // 1 - a11 = (1 - e) + e (1 - c) - e sigma s, each term formed without
  // cancellation.
  d.b1 = -std::expm1(-sigma * h) + e * one_minus_c - e * sigma * s;
  d.b2 = -d.a21;
  return d;
}

DiscretePlant discretize(const PlantParams& plant, double dt) {
  plant.validate();
  const double limit = std::numbers::pi / (10.0 * plant.omega_n);
  if (!(std::isfinite(dt) && dt > 0.0 && dt <= limit * (1.0 + 1e-12))) {
    throw Error(Errc::InvalidTimestep, "dt = " + std::to_string(dt) +
                                           " must satisfy 0 < dt <= pi/(10 omega_n) = " +
                                           std::to_string(limit));
  }
  return transition(plant, dt);
}

double default_timestep(double omega_n) noexcept {
  const double dt = (2.0 * std::numbers::pi / omega_n) / 2000.0;
  return std::clamp(dt, 1e-7, 1e-3);
}

std::ptrdiff_t sample_index(double t, double dt) noexcept {
  return static_cast<std::ptrdiff_t>(std::llround(t / dt));
}

Simulator::Simulator(const PlantParams& plant, double dt) : model_(discretize(plant, dt)) {}

double Simulator::time() const noexcept { return static_cast<double>(index_) * model_.dt; }

TimeSeries Simulator::advance(const PiecewiseConstantSignal& input, double t_end) {
  if (!std::isfinite(t_end)) {
    throw Error(Errc::InvalidArgument, "simulation end time must be finite");
  }
  const double dt = model_.dt;
  const std::ptrdiff_t last = sample_index(t_end, dt);
  const std::ptrdiff_t first = started_ ? index_ + 1 : 0;

  TimeSeries out;
  out.dt = dt;
  out.t0 = static_cast<double>(first) * dt;
  if (last < first) return out;
  out.samples.reserve(static_cast<std::size_t>(last - first + 1));

  const auto events = input.events();
  std::size_t next_event = 0;
  double level = input.initial_level();
  // Level in force over [k dt, (k+1) dt).
  auto level_for = [&](std::ptrdiff_t k) {
    while (next_event < events.size() && sample_index(events[next_event].time, dt) <= k) {
      level = events[next_event].level;
      ++next_event;
    }
    return level;
  };

  if (!started_) {
    out.samples.push_back(x_);
    started_ = true;
  }
  const DiscretePlant& m = model_;
  for (std::ptrdiff_t k = index_; k < last; ++k) {
    const double u = level_for(k);
    const double x = m.a11 * x_ + m.a12 * v_ + m.b1 * u;
    const double v = m.a21 * x_ + m.a22 * v_ + m.b2 * u;
    x_ = x;
    v_ = v;
    out.samples.push_back(x_);
  }
  index_ = std::max(index_, last);
  return out;
}

TimeSeries simulate(const PlantParams& plant, const PiecewiseConstantSignal& input, double dt,
                    double t_end) {
  if (!(t_end > 0.0)) throw Error(Errc::InvalidArgument, "t_end must be > 0");
  Simulator sim(plant, dt);
  return sim.advance(input, t_end);
}

TimeSeries step_response(const PlantParams& plant, double amplitude, double dt, double t_end) {
  if (amplitude == 0.0) throw Error(Errc::InvalidArgument, "step amplitude must be nonzero");
  return simulate(plant, PiecewiseConstantSignal::step(amplitude), dt, t_end);
}

}  // namespace atdf
