#pragma once

// Reference computations that share no code with the library. Each one
// recomputes a quantity the slow, obvious way.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

constexpr double pi = std::numbers::pi;
using cplx = std::complex<double>;

// --- continuous plant --------------------------------------------------------

// x1' = x2, x2' = -wn^2 x1 - 2 zeta wn x2 + wn^2 u
inline std::array<double, 2> rhs(double zeta, double wn, const std::array<double, 2>& x, double u) {
  return {x[1], -wn * wn * x[0] - 2.0 * zeta * wn * x[1] + wn * wn * u};
}

inline std::array<double, 2> rk4(double zeta, double wn, std::array<double, 2> x, double u, double h,
                                 int substeps) {
  const double s = h / substeps;
  for (int i = 0; i < substeps; ++i) {
    auto add = [](const std::array<double, 2>& a, const std::array<double, 2>& b, double c) {
      return std::array<double, 2>{a[0] + c * b[0], a[1] + c * b[1]};
    };
    const auto k1 = rhs(zeta, wn, x, u);
    const auto k2 = rhs(zeta, wn, add(x, k1, s / 2), u);
    const auto k3 = rhs(zeta, wn, add(x, k2, s / 2), u);
    const auto k4 = rhs(zeta, wn, add(x, k3, s), u);
    x[0] += s / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    x[1] += s / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
  }
  return x;
}

struct StepMatrices {
  double a11, a12, a21, a22, b1, b2;
};

// Phi columns from unit initial states with u = 0, Gamma from rest with u = 1.
inline StepMatrices rk4_matrices(double zeta, double wn, double h, int substeps = 1000) {
  const auto c1 = rk4(zeta, wn, {1.0, 0.0}, 0.0, h, substeps);
  const auto c2 = rk4(zeta, wn, {0.0, 1.0}, 0.0, h, substeps);
  const auto g = rk4(zeta, wn, {0.0, 0.0}, 1.0, h, substeps);
  return {c1[0], c2[0], c1[1], c2[1], g[0], g[1]};
}

// Unit step response from rest.
inline double step(double zeta, double wn, double t) {
  if (t < 0.0) return 0.0;
  if (zeta == 0.0) return 1.0 - std::cos(wn * t);
  if (zeta == 1.0) return 1.0 - (1.0 + wn * t) * std::exp(-wn * t);
  const double wd = wn * std::sqrt(1.0 - zeta * zeta);
  const double sigma = zeta * wn;
  return 1.0 - std::exp(-sigma * t) * (std::cos(wd * t) + sigma / wd * std::sin(wd * t));
}

inline double overshoot(double zeta) { return std::exp(-zeta * pi / std::sqrt(1.0 - zeta * zeta)); }
inline double peak_time(double zeta, double wn) { return pi / (wn * std::sqrt(1.0 - zeta * zeta)); }

// Root of f on [lo, hi] by bisection; f(lo), f(hi) of opposite sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// 2% band entry of the critically damped step: (1 + x) e^{-x} = 0.02, x = wn t.
inline double critical_settling(double wn) {
  return bisect([](double x) { return (1.0 + x) * std::exp(-x) - 0.02; }, 1.0, 20.0) / wn;
}

// --- shaper ------------------------------------------------------------------

// Printed Cardano auxiliaries, straight from their definitions.
struct Aux {
  double A, B, C;
};
inline Aux printed_aux(double K, double phi) {
  const double s = std::sin(phi), c = std::cos(phi);
  const double n = K + 3 * K * c - 1;
  return {n / (3 * K * s), n * n / (9 * K * K * s * s) + 1,
          n / (2 * K * s) - (K * c - K + 1) / (2 * K * s) + n * n * n / (27 * K * K * K * s * s * s)};
}

inline cplx bracket(double K, double phi, cplx b) {
  const double s = std::sin(phi), c = std::cos(phi);
  return K - K * c + K * b * b - b * b + 3.0 * K * b * s + 3.0 * K * b * b * c - K * b * b * b * s - 1.0;
}

// Shaper K + A e^{-s(tau+T)} + (1-K-A) e^{-s(tau+2T)} with every term
// multiplied by e^{s(tau+2T)} so that damped poles do not overflow.
inline cplx scaled_shaper(double K, double A, double tau, double T, cplx s) {
  return K * std::exp(s * (tau + 2 * T)) + A * std::exp(s * T) + (1.0 - K - A);
}

// For fixed T the shaper value is affine in A: c + A d. The least-squares A
// and the remaining modulus squared.
struct Profile {
  double A;
  double f2;
};
inline Profile profile(double K, double tau, double T, cplx s) {
  const cplx c = K * std::exp(s * (tau + 2 * T)) + (1.0 - K);
  const cplx d = std::exp(s * T) - 1.0;
  const double dd = std::norm(d);
  if (dd == 0.0) return {0.0, std::norm(c)};
  const double A = -(c.real() * d.real() + c.imag() * d.imag()) / dd;
  return {A, std::norm(c + A * d)};
}

struct GridZero {
  double T = std::numeric_limits<double>::quiet_NaN();
  double A = std::numeric_limits<double>::quiet_NaN();
  double f = std::numeric_limits<double>::infinity();
};

// Smallest T in (0, T_max] where min over A of |G(s)| vanishes. Coarse scan
// for local minima, then a scan at `resolution` around each, then a parabola
// through the best three grid points (|G|^2 is smooth at a zero).
inline GridZero grid_search(double K, double tau, cplx s, double T_max, double resolution = 1e-6,
                            double zero_tol = 1e-6) {
  auto f2 = [&](double T) { return profile(K, tau, T, s).f2; };
  const int coarse_n = 20000;
  const double h = T_max / coarse_n;
  std::vector<double> v(coarse_n + 1);
  for (int i = 0; i <= coarse_n; ++i) v[i] = f2(std::max(i * h, 1e-12));
  for (int i = 1; i < coarse_n; ++i) {
    if (!(v[i] <= v[i - 1] && v[i] <= v[i + 1])) continue;
    const double lo = std::max((i - 2) * h, resolution);
    const double hi = std::min((i + 2) * h, T_max);
    const int n = static_cast<int>(std::ceil((hi - lo) / resolution));
    int best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= n; ++j) {
      const double val = f2(lo + j * resolution);
      if (val < best_v) {
        best_v = val;
        best = j;
      }
    }
    double T = lo + best * resolution;
    if (best > 0 && best < n) {
      const double ym = f2(T - resolution), y0 = best_v, yp = f2(T + resolution);
      const double den = ym - 2 * y0 + yp;
      if (den > 0) T += 0.5 * resolution * (ym - yp) / den;
    }
    const Profile p = profile(K, tau, T, s);
    if (std::sqrt(p.f2) <= zero_tol) return {T, p.A, std::sqrt(p.f2)};
  }
  return {};
}

// --- signals -----------------------------------------------------------------

struct Step {
  double time, level;
};

// Level of a right-continuous staircase at t.
inline double level_at(double initial, const std::vector<Step>& steps, double t) {
  double level = initial;
  for (const auto& s : steps) {
    if (s.time <= t) level = s.level;
  }
  return level;
}

// Discrete convolution of the reference's increments on a dense grid with
// the impulse train {(t_i, a_i)}: y[n] = sum_i a_i r[n - t_i / h].
inline std::vector<double> dense_convolution(double initial, const std::vector<Step>& steps,
                                             const std::vector<std::array<double, 2>>& impulses, double h,
                                             int n) {
  std::vector<double> r(n);
  for (int k = 0; k < n; ++k) r[k] = level_at(initial, steps, k * h);
  std::vector<double> y(n, 0.0);
  for (const auto& imp : impulses) {
    const long shift = std::lround(imp[0] / h);
    for (int k = 0; k < n; ++k) {
      const long src = k - shift;
      y[k] += imp[1] * (src >= 0 ? r[src] : initial);
    }
  }
  return y;
}

}  // namespace oracle
