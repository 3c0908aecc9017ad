#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "atdf/error.hpp"
#include "atdf/lti_sim.hpp"
#include "oracles.hpp"

using namespace atdf;
using oracle::pi;

TEST_SUITE("lti_sim") {

TEST_CASE("transition tends to identity as the step vanishes") {
  const auto d = transition({0.0, pi}, 1e-12);
  CHECK(d.a11 == doctest::Approx(1.0));
  CHECK(std::abs(d.a12) < 1e-11);
  CHECK(std::abs(d.a21) < 1e-11);
  CHECK(d.a22 == doctest::Approx(1.0));
  CHECK(std::abs(d.b1) < 1e-20);
  CHECK(std::abs(d.b2) < 1e-11);
}

TEST_CASE("a full undamped period is the identity map") {
  // dt = 2 s breaks the sampling precondition of discretize, so use the
  // unguarded closed form directly.
  const auto d = transition({0.0, pi}, 2.0);
  CHECK(std::abs(d.a11 - 1.0) < 1e-14);
  CHECK(std::abs(d.a12) < 1e-14);
  CHECK(std::abs(d.a21) < 1e-14);
  CHECK(std::abs(d.a22 - 1.0) < 1e-14);
  CHECK(std::abs(d.b1) < 1e-14);
  CHECK(std::abs(d.b2) < 1e-14);
  CHECK_THROWS_AS(discretize({0.0, pi}, 2.0), Error);
}

TEST_CASE("closed form matches RK4 with 1000 substeps") {
  for (double zeta : {0.0, 0.5, 1.0, 2.5}) {
    CAPTURE(zeta);
    const auto d = discretize({zeta, pi}, 1e-3);
    const auto o = oracle::rk4_matrices(zeta, pi, 1e-3);
    CHECK(std::abs(d.a11 - o.a11) < 1e-10);
    CHECK(std::abs(d.a12 - o.a12) < 1e-10);
    CHECK(std::abs(d.a21 - o.a21) < 1e-10);
    CHECK(std::abs(d.a22 - o.a22) < 1e-10);
    CHECK(std::abs(d.b1 - o.b1) < 1e-10);
    CHECK(std::abs(d.b2 - o.b2) < 1e-10);
  }
}

TEST_CASE("long steps against RK4 in every regime") {
  for (double zeta : {0.0, 0.3, 1.0, 1.0 + 1e-13, 3.0}) {
    CAPTURE(zeta);
    const auto d = transition({zeta, 2.0}, 0.7);
    const auto o = oracle::rk4_matrices(zeta, 2.0, 0.7, 20000);
    CHECK(std::abs(d.a11 - o.a11) < 1e-10);
    CHECK(std::abs(d.a21 - o.a21) < 1e-10);
    CHECK(std::abs(d.b1 - o.b1) < 1e-10);
    CHECK(std::abs(d.b2 - o.b2) < 1e-10);
  }
}

TEST_CASE("stability and precondition") {
  CHECK(discretize({0.5, pi}, 1e-3).spectral_radius() < 1.0);
  CHECK(discretize({0.0, pi}, 1e-3).spectral_radius() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(discretize({0.5, pi}, 0.0), Error);
  CHECK_THROWS_AS(discretize({-0.1, pi}, 1e-3), Error);
  CHECK_THROWS_AS(discretize({0.5, 0.0}, 1e-3), Error);
}

TEST_CASE("default timestep rule") {
  CHECK(default_timestep(pi) == doctest::Approx(1e-3));
  CHECK(default_timestep(3 * pi) == doctest::Approx(2.0 / 3.0 / 2000.0));
  CHECK(default_timestep(3000 * pi) == doctest::Approx(1e-7));  // clamped
  CHECK(default_timestep(0.1) == 1e-3);
}

TEST_CASE("zero input stays at rest") {
  const auto r = simulate({0.3, 5.0}, PiecewiseConstantSignal(), 1e-3, 5.0);
  CHECK(r.size() == 5001);
  CHECK(std::all_of(r.samples.begin(), r.samples.end(), [](double x) { return x == 0.0; }));
}

TEST_CASE("underdamped step: final value and overshoot") {
  const auto r = step_response({0.707, pi}, 1.0, 1e-3, 20.0);
  CHECK(std::abs(r.samples.back() - 1.0) < 1e-6);
  const double peak = *std::max_element(r.samples.begin(), r.samples.end());
  CHECK(std::abs(peak - (1.0 + oracle::overshoot(0.707))) < 1e-3);
}

TEST_CASE("samples agree with the closed-form step response") {
  for (double zeta : {0.0, 0.2, 0.707, 1.0}) {
    CAPTURE(zeta);
    const auto r = step_response({zeta, 3 * pi}, 0.5, 1e-4, 3.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      worst = std::max(worst, std::abs(r.samples[k] - 0.5 * oracle::step(zeta, 3 * pi, r.time(k))));
    }
    CHECK(worst < 1e-11);
  }
}

TEST_CASE("undamped small step oscillates between 0 and 2K with period 2 s") {
  const auto r = step_response({0.0, pi}, 0.01, 1e-3, 10.0);
  for (int k : {1000, 3000, 5000, 7000, 9000}) CHECK(std::abs(r.samples[k] - 0.02) < 1e-9 * 0.02);
  for (int k : {2000, 4000, 6000}) CHECK(std::abs(r.samples[k]) < 1e-12);
}

TEST_CASE("linearity") {
  const PiecewiseConstantSignal u(0.0, {{0.0, 1.0}, {0.7, -2.0}, {1.9, 0.3}});
  const auto a = simulate({0.2, 4.0}, u, 1e-3, 5.0);
  const auto b = simulate({0.2, 4.0}, u.scaled(-3.5), 1e-3, 5.0);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(b.samples[k] == doctest::Approx(-3.5 * a.samples[k]).epsilon(1e-12));
}

TEST_CASE("continued advance equals one long run") {
  const PlantParams p{0.1, 2 * pi};
  const PiecewiseConstantSignal u(0.0, {{0.0, 1.0}, {1.25, 0.5}});
  const auto whole = simulate(p, u, 1e-3, 3.0);
  Simulator sim(p, 1e-3);
  auto first = sim.advance(u, 1.0);
  const auto second = sim.advance(u, 3.0);
  CHECK(second.t0 == doctest::Approx(1.001));
  first.samples.insert(first.samples.end(), second.samples.begin(), second.samples.end());
  REQUIRE(first.samples.size() == whole.samples.size());
  CHECK(first.samples == whole.samples);
}

TEST_CASE("events snap to the nearest sample") {
  const PlantParams p{0.5, pi};
  const auto a = simulate(p, PiecewiseConstantSignal::step(1.0, 0.5004), 1e-3, 2.0);
  const auto b = simulate(p, PiecewiseConstantSignal::step(1.0, 0.5), 1e-3, 2.0);
  CHECK(a.samples == b.samples);
  CHECK(a.samples[500] == 0.0);
  CHECK(a.samples[501] > 0.0);
}

}
