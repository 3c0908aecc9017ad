#pragma once

#include <complex>
#include <string_view>
#include <utility>
#include <vector>

#include "atdf/estimator.hpp"

namespace atdf {

/// User-chosen shaping parameters: K is both the fraction of the reference
/// commanded during estimation and the first impulse; tau is the estimation
/// duration.
struct ShaperConfig {
  double K = 0.01;
  double tau = 1.0;

  /// 0 < K < 0.5, tau > 0. Throws Errc::ValidationError.
  void validate() const;
};

struct Impulse {
  double time;
  double amplitude;
};

enum class DesignMethod { AnalyticalUndamped, NumericalDamped, FixedTimeBaseline, PassThrough };

std::string_view to_string(DesignMethod m) noexcept;

/// Three-impulse time-delay filter
///   G(s) = K + A e^{-s(tau+T)} + (1-A-K) e^{-s(tau+2T)}
/// (tau = 0 for the fixed-time baseline).
struct ShaperDesign {
  std::vector<Impulse> impulses;
  double A = 0.0;
  double T = 0.0;
  double tau = 0.0;
  DesignMethod method = DesignMethod::PassThrough;
  double zeta = 0.0;     ///< damping the zeros were placed for
  double omega_n = 0.0;  ///< natural frequency the zeros were placed for
  double residual = 0.0; ///< scaled |G| at the plant pole

  [[nodiscard]] double last_impulse_time() const noexcept;
};

/// Single unit impulse at t = 0 (no shaping).
ShaperDesign pass_through_design();

/// sum_i a_i exp(-s t_i). Overflows for large Re(-s) t; see pole_residual.
std::complex<double> evaluate_shaper(const ShaperDesign& design, std::complex<double> s);

/// |G(s)| / max_i |a_i e^{-s t_i}|, evaluated with all exponents shifted by
/// the last impulse time so that nothing overflows.
double scaled_modulus(const ShaperDesign& design, std::complex<double> s);

/// -zeta wn + j wn sqrt(1 - zeta^2).
std::complex<double> plant_pole(double zeta, double omega_n);

/// scaled_modulus at plant_pole(zeta, omega_n).
double pole_residual(const ShaperDesign& design, double zeta, double omega_n);

// ---------------------------------------------------------------------------
// Undamped plants: closed form via beta = tan(wn T / 2).
// ---------------------------------------------------------------------------

namespace shaper_tuning {
inline constexpr double kSingularSin = 1e-8;   // |sin(wn tau)| at or below: reduced polynomial
inline constexpr double kImagTolerance = 1e-9; // |Im beta| <= tol (1 + |beta|) counts as real
inline constexpr double kDenominator = 1e-10;  // amplitude formula denominator floor
inline constexpr double kAcceptResidual = 1e-9;
inline constexpr double kNewtonResidual = 1e-10;
inline constexpr double kMaxDampedZeta = 0.99;
inline constexpr int kDefaultKMax = 3;
}  // namespace shaper_tuning

/// Cardano auxiliaries of the cubic factor
///   K - K cos(phi) + (K - 1 + 3K cos(phi)) b^2 + 3K sin(phi) b - K sin(phi) b^3 - 1 = 0
/// with phi = wn tau and roots b = A_aux + U + B_aux / U.
struct CubicAux {
  double A_aux = 0.0;
  double B_aux = 0.0;
  double C_aux = 0.0;
  std::complex<double> D_aux;
  std::complex<double> U_aux;
  double phi = 0.0;
};

/// Throws DegeneratePhase when |sin(phi)| <= kSingularSin.
CubicAux cubic_coefficients(const ShaperConfig& config, double omega_n);

/// Value of the cubic factor above at beta.
std::complex<double> cubic_factor(double K, double phi, std::complex<double> beta);

struct BetaRoot {
  std::complex<double> value;
  bool at_infinity = false;  ///< theta = pi, unreachable by tan(theta / 2)
};

/// {0, beta2, beta3, beta4, inf}; on the sin(phi) = 0 degeneracy the cubic
/// collapses to a quadratic that is solved directly.
std::vector<BetaRoot> beta_roots(const ShaperConfig& config, double omega_n);

struct SwitchCandidate {
  double T;
  BetaRoot source;
  int k;
};

/// Real roots only; T = (2/wn) atan(beta) + 2 pi k / wn for k = 0..k_max,
/// positive values, ascending. Throws NoRealRoots if nothing survives.
std::vector<SwitchCandidate> switch_time_candidates(const std::vector<BetaRoot>& betas,
                                                    double omega_n,
                                                    int k_max = shaper_tuning::kDefaultKMax);

/// A from the real-part constraint. Throws DegenerateDenominator when
/// cos(wn (tau+T)) and cos(wn (tau+2T)) coincide.
double amplitude_for_switch(const ShaperConfig& config, double omega_n, double T);

/// Smallest positive T whose design places a zero at j wn. Throws NoValidDesign.
ShaperDesign design_undamped(const ShaperConfig& config, double omega_n);

// ---------------------------------------------------------------------------
// Damped plants: Newton on (A, T).
// ---------------------------------------------------------------------------

/// Real and imaginary constraint residuals at the damped pole, multiplied by
/// e^{-zeta wn (tau + 2T)} (same zero set, no overflow for large tau).
std::pair<double, double> damped_residual(const ShaperConfig& config, double zeta,
                                          double omega_n, double A, double T);

/// 0 < zeta <= 0.99. Throws NoValidDesign when every start fails.
ShaperDesign design_damped(const ShaperConfig& config, double zeta, double omega_n);

/// Baseline that ignores the estimation time: impulses at 0, T, 2T.
ShaperDesign design_fixed_baseline(const ShaperConfig& config, double zeta, double omega_n);

/// Dispatch on the estimated damping class. Critically damped estimates are
/// shaped as zeta = 0.99.
ShaperDesign design(const ShaperConfig& config, const Estimate& estimate);

/// design_undamped for zeta == 0, design_damped otherwise.
ShaperDesign design_for(const ShaperConfig& config, double zeta, double omega_n);

}  // namespace atdf
