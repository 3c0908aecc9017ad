#pragma once

#include <cstddef>

#include "atdf/signal.hpp"

namespace atdf {

/// Parameters of the unity-DC-gain plant wn^2 / (s^2 + 2 zeta wn s + wn^2).
struct PlantParams {
  double zeta = 0.0;
  double omega_n = 1.0;

  /// Throws Errc::InvalidArgument for zeta < 0 or omega_n <= 0.
  void validate() const;
  /// zeta > 1 is simulated but not part of the shaping family.
  [[nodiscard]] bool overdamped() const noexcept { return zeta > 1.0; }
};

enum class DampingRegime { Undamped, Underdamped, Critical, Overdamped };

DampingRegime damping_regime(double zeta) noexcept;

/// Zero-order-hold discretization of x1' = x2, x2' = -wn^2 x1 - 2 zeta wn x2 + wn^2 u.
/// x[k+1] = Phi x[k] + Gamma u[k], Phi = [a11 a12; a21 a22], Gamma = [b1; b2].
struct DiscretePlant {
  double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;
  double b1 = 0.0, b2 = 0.0;
  double dt = 0.0;

  /// Largest eigenvalue modulus of Phi.
  [[nodiscard]] double spectral_radius() const noexcept;
};

/// Exact matrix exponential for any h >= 0, closed form per damping regime.
/// No sampling-rate precondition; used directly where long steps are wanted.
DiscretePlant transition(const PlantParams& plant, double h);

/// transition() guarded by 0 < dt <= pi / (10 wn) (20 samples per period).
/// Throws Errc::InvalidTimestep otherwise.
DiscretePlant discretize(const PlantParams& plant, double dt);

/// (2 pi / wn) / 2000 clamped to [1e-7, 1e-3].
double default_timestep(double omega_n) noexcept;

/// Number of the sample nearest to t on a grid of spacing dt.
std::ptrdiff_t sample_index(double t, double dt) noexcept;

/// Black-box plant: holds the true parameters privately and only hands out
/// sampled responses. Starts at rest at t = 0. Successive advance() calls
/// continue one trajectory, so an input computed from earlier samples can
/// drive the rest of the run.
class Simulator {
 public:
  Simulator(const PlantParams& plant, double dt);

  /// Emits every not-yet-emitted sample up to t_end (inclusive, snapped to
  /// the grid). Input event times are snapped to the nearest sample; the
  /// level in force at sample k is held over [k dt, (k+1) dt).
  /// The first call includes the sample at t = 0.
  TimeSeries advance(const PiecewiseConstantSignal& input, double t_end);

  [[nodiscard]] double dt() const noexcept { return model_.dt; }
  /// Time of the last emitted sample (0 before the first call).
  [[nodiscard]] double time() const noexcept;
  [[nodiscard]] double position() const noexcept { return x_; }
  [[nodiscard]] double velocity() const noexcept { return v_; }

 private:
  DiscretePlant model_;
  double x_ = 0.0;
  double v_ = 0.0;
  std::ptrdiff_t index_ = 0;  // sample index the state refers to
  bool started_ = false;
};

/// Response from rest to `input`, samples at k dt for k = 0 .. round(t_end/dt).
TimeSeries simulate(const PlantParams& plant, const PiecewiseConstantSignal& input, double dt,
                    double t_end);

/// simulate() with a single step of `amplitude` at t = 0.
TimeSeries step_response(const PlantParams& plant, double amplitude, double dt, double t_end);

}  // namespace atdf
