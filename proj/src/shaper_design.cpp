#include "atdf/shaper_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "atdf/error.hpp"

namespace atdf {

using cplx = std::complex<double>;
using namespace shaper_tuning;

namespace {

constexpr double kPi = std::numbers::pi;

ShaperDesign make_design(double K, double tau, double A, double T, DesignMethod method,
                         double zeta, double omega_n, std::optional<double> last_amplitude = {}) {
  ShaperDesign d;
  d.A = A;
  d.T = T;
  d.tau = tau;
  d.method = method;
  d.zeta = zeta;
  d.omega_n = omega_n;
  // 1 - (K + A) keeps K + A + last == 1 exactly whenever K + A lies in [0.5, 2].
  const double last = last_amplitude ? *last_amplitude : 1.0 - (K + A);
  if (last_amplitude && (K + A) + last != 1.0) {
    // A is near 1 when the last impulse is tiny; a few ulps of A restore an
    // exact unit sum without touching the digits of `last`.
    for (int n = 1; n <= 4 && (K + d.A) + last != 1.0; ++n) {
      for (const double dir : {1.0, -1.0}) {
        double a = A;
        for (int i = 0; i < n; ++i) a = std::nextafter(a, dir * 2.0);
        if ((K + a) + last == 1.0) {
          d.A = a;
          break;
        }
      }
    }
  }
  d.impulses = {{0.0, K}, {tau + T, d.A}, {tau + 2.0 * T, last}};
  d.residual = pole_residual(d, zeta, omega_n);
  return d;
}

// Coefficients of the cubic factor, highest power first.
struct Cubic {
  double c3, c2, c1, c0;
  [[nodiscard]] cplx value(cplx b) const { return ((c3 * b + c2) * b + c1) * b + c0; }
  [[nodiscard]] cplx slope(cplx b) const { return (3.0 * c3 * b + 2.0 * c2) * b + c1; }
};

Cubic cubic_of(double K, double phi) {
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  return {-K * s, K - 1.0 + 3.0 * K * c, 3.0 * K * s, K - K * c - 1.0};
}

// A few Newton steps on the closed-form root; kept only while they help.
cplx polish(const Cubic& p, cplx b) {
  cplx best = b;
  double best_abs = std::abs(p.value(b));
  for (int i = 0; i < 4 && best_abs > 0.0; ++i) {
    const cplx slope = p.slope(best);
    if (slope == cplx(0.0, 0.0)) break;
    const cplx next = best - p.value(best) / slope;
    const double next_abs = std::abs(p.value(next));
    if (!(next_abs < best_abs)) break;
    best = next;
    best_abs = next_abs;
  }
  return best;
}

CubicAux cubic_aux(double K, double phi) {
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  CubicAux aux;
  aux.phi = phi;
  const double num = K + 3.0 * K * c - 1.0;
  const double a = num / (3.0 * K * s);
  const double d = (K * c - K + 1.0) / (K * s);
  aux.A_aux = a;
  aux.B_aux = a * a + 1.0;
  aux.C_aux = num / (2.0 * K * s) - (K * c - K + 1.0) / (2.0 * K * s) + a * a * a;
  // C^2 - B^3 with the a^6 and a^4 terms cancelled symbolically; forming it
  // directly loses every digit once K sin(phi) is small.
  const double disc = -a * a * a * d - 0.75 * a * a - 1.5 * a * d + 0.25 * d * d - 1.0;
  cplx D = std::sqrt(cplx(disc, 0.0));
  // Either square root gives the same three roots; take the one that keeps
  // C + D away from cancellation.
  if (aux.C_aux * D.real() < 0.0) D = -D;
  aux.D_aux = D;
  aux.U_aux = std::pow(aux.C_aux + D, 1.0 / 3.0);
  return aux;
}

// Transcendental switch-time condition in theta = wn T for phi = wn tau.
double switch_condition(double K, double phi, double theta) {
  return (K - 1.0) * std::sin(theta) + K * std::sin(theta + phi) - K * std::sin(2.0 * theta + phi);
}

double switch_condition_slope(double K, double phi, double theta) {
  return (K - 1.0) * std::cos(theta) + K * std::cos(theta + phi) -
         2.0 * K * std::cos(2.0 * theta + phi);
}

double refine_switch_time(double K, double tau, double omega_n, double T) {
  const double phi = omega_n * tau;
  double theta = omega_n * T;
  double f = switch_condition(K, phi, theta);
  bool moved = false;
  for (int i = 0; i < 6; ++i) {
    if (std::abs(f) <= 4.0 * std::numeric_limits<double>::epsilon()) break;
    const double slope = switch_condition_slope(K, phi, theta);
    if (slope == 0.0) break;
    const double next = theta - f / slope;
    const double f_next = switch_condition(K, phi, next);
    if (!(std::abs(f_next) < std::abs(f))) break;
    theta = next;
    f = f_next;
    moved = true;
  }
  return moved ? theta / omega_n : T;
}

double amplitude(double K, double tau, double omega_n, double T) {
  const double c1 = std::cos(omega_n * (tau + T));
  const double c2 = std::cos(omega_n * (tau + 2.0 * T));
  const double den = c1 - c2;
  if (std::abs(den) <= kDenominator) {
    throw Error(Errc::DegenerateDenominator,
                "cos(wn(tau+T)) == cos(wn(tau+2T)) at T = " + std::to_string(T));
  }
  return -(K - c2 * (K - 1.0)) / den;
}

std::vector<BetaRoot> roots_for(double K, double phi) {
  std::vector<BetaRoot> out;
  out.push_back({cplx(0.0, 0.0), false});
  if (std::abs(std::sin(phi)) <= kSingularSin) {
    // sin(phi) = 0: (K - 1 + 3K c) b^2 + (K - K c - 1) = 0 with c = +-1.
    const double c = std::cos(phi) > 0.0 ? 1.0 : -1.0;
    const double q2 = K - 1.0 + 3.0 * K * c;
    const double q0 = K - K * c - 1.0;
    if (q2 != 0.0) {
      const cplx r = std::sqrt(cplx(-q0 / q2, 0.0));
      out.push_back({r, false});
      out.push_back({-r, false});
    }
  } else {
    const CubicAux aux = cubic_aux(K, phi);
    const cplx U = aux.U_aux;
    const cplx BU = aux.B_aux / U;
    const cplx j(0.0, 1.0);
    const double h = std::sqrt(3.0) / 2.0;
    const Cubic p = cubic_of(K, phi);
    const cplx b2 = aux.A_aux + BU + U;
    const cplx b3 = aux.A_aux - 0.5 * U - 0.5 * BU - j * h * (U - BU);
    const cplx b4 = aux.A_aux - 0.5 * U - 0.5 * BU + j * h * (U - BU);
    for (const cplx b : {b2, b3, b4}) out.push_back({polish(p, b), false});
  }
  out.push_back({cplx(std::numeric_limits<double>::infinity(), 0.0), true});
  return out;
}

ShaperDesign undamped_impl(double K, double tau, double omega_n, DesignMethod method) {
  if (!(std::isfinite(omega_n) && omega_n > 0.0)) {
    throw Error(Errc::InvalidArgument, "omega_n must be > 0");
  }
  const auto betas = roots_for(K, omega_n * tau);
  std::vector<SwitchCandidate> candidates;
  try {
    candidates = switch_time_candidates(betas, omega_n);
  } catch (const Error& e) {
    throw Error(Errc::NoValidDesign, std::string("undamped design: ") + e.what());
  }

  std::ostringstream rejected;
  std::optional<ShaperDesign> best;
  for (const auto& cand : candidates) {
    const double T = refine_switch_time(K, tau, omega_n, cand.T);
    if (!(T > 0.0)) continue;
    double A = 0.0;
    try {
      A = amplitude(K, tau, omega_n, T);
    } catch (const Error&) {
      rejected << " T=" << T << "(denominator)";
      continue;
    }
    ShaperDesign d = make_design(K, tau, A, T, method, 0.0, omega_n);
    const cplx g = evaluate_shaper(d, cplx(0.0, omega_n));
    double scale = 0.0;
    for (const auto& imp : d.impulses) scale = std::max(scale, std::abs(imp.amplitude));
    // Real and imaginary constraints checked separately.
    if (std::abs(g.real()) > kAcceptResidual * scale || std::abs(g.imag()) > kAcceptResidual * scale ||
        d.residual > kAcceptResidual) {
      rejected << " T=" << T << "(|G|=" << d.residual << ")";
      continue;
    }
    if (!best) {
      best = d;
    } else if (std::abs(d.T - best->T) <= 1e-12 * best->T && std::abs(d.A) < std::abs(best->A)) {
      best = d;
    } else if (d.T < best->T * (1.0 - 1e-12)) {
      best = d;
    }
  }
  if (!best) {
    throw Error(Errc::NoValidDesign, "no switch-time candidate places a zero at j*wn; rejected:" +
                                         rejected.str());
  }
  return *best;
}

bool solve2(double j11, double j12, double j21, double j22, double r1, double r2, double& x1,
            double& x2) {
  const double det = j11 * j22 - j12 * j21;
  if (det == 0.0 || !std::isfinite(det)) return false;
  x1 = (r1 * j22 - j12 * r2) / det;
  x2 = (j11 * r2 - j21 * r1) / det;
  return std::isfinite(x1) && std::isfinite(x2);
}

// Scaled constraint pair in terms of the last amplitude B (A = 1 - K - B).
// Near critical damping B is tiny; carrying it directly keeps its digits.
std::pair<double, double> residual_kb(double K, double tau, double zeta, double omega_n, double B,
                                      double T) {
  const double sigma = zeta * omega_n;
  const double wd = omega_n * std::sqrt((1.0 - zeta) * (1.0 + zeta));
  const double A = (1.0 - K) - B;
  const double k_term = K * std::exp(-sigma * (tau + 2.0 * T));
  const double a_gain = A * std::exp(-sigma * T);
  const double re = k_term + a_gain * std::cos(wd * (tau + T)) + B * std::cos(wd * (tau + 2.0 * T));
  const double im = a_gain * std::sin(wd * (tau + T)) + B * std::sin(wd * (tau + 2.0 * T));
  return {re, im};
}

double residual_norm(double K, double tau, double zeta, double omega_n, double B, double T) {
  const auto [re, im] = residual_kb(K, tau, zeta, omega_n, B, T);
  return std::hypot(re, im);
}

// Size of the largest scaled term, so convergence is judged relative to it.
double residual_scale(double K, double tau, double zeta, double omega_n, double B, double T) {
  const double sigma = zeta * omega_n;
  const double A = (1.0 - K) - B;
  return std::max({K * std::exp(-sigma * (tau + 2.0 * T)), std::abs(A) * std::exp(-sigma * T),
                   std::abs(B)});
}

// Damped Newton with a central-difference Jacobian in (B, T). Returns false
// if the iterate leaves T > 0 or stalls above the acceptance threshold.
bool newton_damped(double K, double tau, double zeta, double omega_n, double& B, double& T) {
  const double wd = omega_n * std::sqrt((1.0 - zeta) * (1.0 + zeta));
  auto r = [&](double b, double t) { return residual_kb(K, tau, zeta, omega_n, b, t); };
  double norm = residual_norm(K, tau, zeta, omega_n, B, T);
  for (int iter = 0; iter < 200; ++iter) {
    if (norm <= 1e-17 * residual_scale(K, tau, zeta, omega_n, B, T)) break;
    const double hB = 1e-6 * std::max(1e-3, std::abs(B));
    const double hT = 1e-6 / wd;
    const auto [bp_re, bp_im] = r(B + hB, T);
    const auto [bm_re, bm_im] = r(B - hB, T);
    const auto [tp_re, tp_im] = r(B, T + hT);
    const auto [tm_re, tm_im] = r(B, T - hT);
    const auto [re, im] = r(B, T);
    double dB = 0.0, dT = 0.0;
    if (!solve2((bp_re - bm_re) / (2 * hB), (tp_re - tm_re) / (2 * hT), (bp_im - bm_im) / (2 * hB),
                (tp_im - tm_im) / (2 * hT), re, im, dB, dT)) {
      return false;
    }
    double step = 1.0;
    bool improved = false;
    while (step > 1e-4) {
      const double B_next = B - step * dB;
      const double T_next = T - step * dT;
      if (T_next > 0.0) {
        const double n_next = residual_norm(K, tau, zeta, omega_n, B_next, T_next);
        if (n_next < norm) {
          B = B_next;
          T = T_next;
          norm = n_next;
          improved = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return T > 0.0 && norm <= kNewtonResidual * residual_scale(K, tau, zeta, omega_n, B, T);
}

ShaperDesign damped_impl(double K, double tau, double zeta, double omega_n, DesignMethod method) {
  if (!(std::isfinite(omega_n) && omega_n > 0.0)) {
    throw Error(Errc::InvalidArgument, "omega_n must be > 0");
  }
  if (!(zeta > 0.0 && zeta <= kMaxDampedZeta * (1.0 + 1e-12))) {
    throw Error(Errc::InvalidArgument, "damped design needs 0 < zeta <= 0.99");
  }
  const double root = std::sqrt((1.0 - zeta) * (1.0 + zeta));
  const double wd = omega_n * root;
  const double T0 = kPi / wd;
  // K = 0 limit: two-impulse zero-vibration shaper.
  const double A0 = 1.0 / (1.0 + std::exp(-zeta * kPi / root));

  std::ostringstream rejected;
  for (int m = 0; m <= 8; ++m) {
    double B = (1.0 - K) - A0;
    double T = T0 + m * kPi / (2.0 * wd);
    if (!newton_damped(K, tau, zeta, omega_n, B, T)) {
      rejected << " start " << m << " did not converge;";
      continue;
    }
    ShaperDesign d = make_design(K, tau, (1.0 - K) - B, T, method, zeta, omega_n, B);
    if (d.residual <= kAcceptResidual) return d;
    rejected << " start " << m << " |G|=" << d.residual << ";";
  }
  throw Error(Errc::NoValidDesign, "damped design failed from every start:" + rejected.str());
}

}  // namespace

std::string_view to_string(DesignMethod m) noexcept {
  switch (m) {
    case DesignMethod::AnalyticalUndamped: return "AnalyticalUndamped";
    case DesignMethod::NumericalDamped: return "NumericalDamped";
    case DesignMethod::FixedTimeBaseline: return "FixedTimeBaseline";
    case DesignMethod::PassThrough: return "PassThrough";
  }
  return "Unknown";
}

void ShaperConfig::validate() const {
  if (!(std::isfinite(K) && K > 0.0 && K < 0.5)) {
    throw Error(Errc::ValidationError, "K = " + std::to_string(K) + " violates 0 < K < 0.5");
  }
  if (!(std::isfinite(tau) && tau > 0.0)) {
    throw Error(Errc::ValidationError, "tau = " + std::to_string(tau) + " violates tau > 0");
  }
}

double ShaperDesign::last_impulse_time() const noexcept {
  double t = 0.0;
  for (const auto& imp : impulses) t = std::max(t, imp.time);
  return t;
}

ShaperDesign pass_through_design() {
  ShaperDesign d;
  d.impulses = {{0.0, 1.0}};
  d.method = DesignMethod::PassThrough;
  return d;
}

cplx evaluate_shaper(const ShaperDesign& design, cplx s) {
  cplx sum(0.0, 0.0);
  for (const auto& imp : design.impulses) sum += imp.amplitude * std::exp(-s * imp.time);
  return sum;
}

double scaled_modulus(const ShaperDesign& design, cplx s) {
  const double t_ref = design.last_impulse_time();
  cplx sum(0.0, 0.0);
  double largest = 0.0;
  for (const auto& imp : design.impulses) {
    const cplx term = imp.amplitude * std::exp(-s * (imp.time - t_ref));
    sum += term;
    largest = std::max(largest, std::abs(term));
  }
  return largest > 0.0 ? std::abs(sum) / largest : 0.0;
}

cplx plant_pole(double zeta, double omega_n) {
  const double z = std::min(zeta, 1.0);
  return {-z * omega_n, omega_n * std::sqrt((1.0 - z) * (1.0 + z))};
}

double pole_residual(const ShaperDesign& design, double zeta, double omega_n) {
  return scaled_modulus(design, plant_pole(zeta, omega_n));
}

CubicAux cubic_coefficients(const ShaperConfig& config, double omega_n) {
  const double phi = omega_n * config.tau;
  if (std::abs(std::sin(phi)) <= kSingularSin) {
    throw Error(Errc::DegeneratePhase, "|sin(wn tau)| <= 1e-8; use the reduced polynomial");
  }
  return cubic_aux(config.K, phi);
}

cplx cubic_factor(double K, double phi, cplx b) {
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  return K - K * c + K * b * b - b * b + 3.0 * K * b * s + 3.0 * K * b * b * c - K * b * b * b * s - 1.0;
}

std::vector<BetaRoot> beta_roots(const ShaperConfig& config, double omega_n) {
  return roots_for(config.K, omega_n * config.tau);
}

std::vector<SwitchCandidate> switch_time_candidates(const std::vector<BetaRoot>& betas,
                                                    double omega_n, int k_max) {
  if (k_max < 1) throw Error(Errc::InvalidArgument, "k_max must be >= 1");
  std::vector<SwitchCandidate> out;
  for (const auto& b : betas) {
    double base = 0.0;
    if (b.at_infinity) {
      base = kPi / omega_n;
    } else if (std::abs(b.value.imag()) <= kImagTolerance * (1.0 + std::abs(b.value))) {
      base = 2.0 / omega_n * std::atan(b.value.real());
    } else {
      continue;
    }
    for (int k = 0; k <= k_max; ++k) {
      const double T = base + 2.0 * kPi * k / omega_n;
      if (T > 0.0) out.push_back({T, b, k});
    }
  }
  if (out.empty()) throw Error(Errc::NoRealRoots, "no real root gives a positive switch time");
  std::stable_sort(out.begin(), out.end(),
                   [](const SwitchCandidate& a, const SwitchCandidate& b) { return a.T < b.T; });
  return out;
}

double amplitude_for_switch(const ShaperConfig& config, double omega_n, double T) {
  return amplitude(config.K, config.tau, omega_n, T);
}

ShaperDesign design_undamped(const ShaperConfig& config, double omega_n) {
  config.validate();
  return undamped_impl(config.K, config.tau, omega_n, DesignMethod::AnalyticalUndamped);
}

std::pair<double, double> damped_residual(const ShaperConfig& config, double zeta, double omega_n,
                                          double A, double T) {
  const double K = config.K;
  const double tau = config.tau;
  const double sigma = zeta * omega_n;
  const double wd = omega_n * std::sqrt((1.0 - zeta) * (1.0 + zeta));
  const double B = 1.0 - K - A;
  // Both constraints multiplied through by e^{-sigma (tau + 2T)}.
  const double k_term = K * std::exp(-sigma * (tau + 2.0 * T));
  const double a_gain = A * std::exp(-sigma * T);
  const double re = k_term + a_gain * std::cos(wd * (tau + T)) + B * std::cos(wd * (tau + 2.0 * T));
  const double im = a_gain * std::sin(wd * (tau + T)) + B * std::sin(wd * (tau + 2.0 * T));
  return {re, im};
}

ShaperDesign design_damped(const ShaperConfig& config, double zeta, double omega_n) {
  config.validate();
  return damped_impl(config.K, config.tau, zeta, omega_n, DesignMethod::NumericalDamped);
}

ShaperDesign design_fixed_baseline(const ShaperConfig& config, double zeta, double omega_n) {
  config.validate();
  if (zeta == 0.0) return undamped_impl(config.K, 0.0, omega_n, DesignMethod::FixedTimeBaseline);
  return damped_impl(config.K, 0.0, zeta, omega_n, DesignMethod::FixedTimeBaseline);
}

ShaperDesign design_for(const ShaperConfig& config, double zeta, double omega_n) {
  if (!(zeta >= 0.0)) throw Error(Errc::InvalidArgument, "zeta must be >= 0");
  if (zeta == 0.0) return design_undamped(config, omega_n);
  return design_damped(config, std::min(zeta, kMaxDampedZeta), omega_n);
}

ShaperDesign design(const ShaperConfig& config, const Estimate& estimate) {
  config.validate();
  if (!(std::isfinite(estimate.omega_n_hat) && estimate.omega_n_hat > 0.0)) {
    throw Error(Errc::InvalidArgument, "estimate has no positive natural frequency");
  }
  ShaperDesign d;
  switch (estimate.damping) {
    case DampingClass::Undamped:
      d = design_undamped(config, estimate.omega_n_hat);
      break;
    case DampingClass::Underdamped:
      d = design_for(config, estimate.zeta_hat, estimate.omega_n_hat);
      break;
    case DampingClass::CriticallyDamped:
      d = design_damped(config, kMaxDampedZeta, estimate.omega_n_hat);
      break;
  }
  if (!(d.residual <= kAcceptResidual)) {
    throw Error(Errc::NoValidDesign, "design residual " + std::to_string(d.residual) +
                                         " exceeds 1e-9");
  }
  return d;
}

}  // namespace atdf
