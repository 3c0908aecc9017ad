#include <doctest.h>

#include <cmath>

#include "atdf/tdf_reference.hpp"
#include "oracles.hpp"

using namespace atdf;

namespace {

ShaperDesign half_turn() {
  ShaperDesign d;
  d.A = 0.5;
  d.T = 1.0;
  d.tau = 2.0;
  d.impulses = {{0.0, 0.01}, {3.0, 0.5}, {4.0, 0.49}};
  d.method = DesignMethod::AnalyticalUndamped;
  return d;
}

std::vector<oracle::Step> steps_of(const PiecewiseConstantSignal& s) {
  std::vector<oracle::Step> out;
  for (const auto& e : s.events()) out.push_back({e.time, e.level});
  return out;
}

}  // namespace

TEST_SUITE("tdf_reference") {

TEST_CASE("unit step through the half-turn design") {
  const auto s = shape(PiecewiseConstantSignal::step(1.0), half_turn()).signal;
  REQUIRE(s.events().size() == 3);
  CHECK(s.level_at(0.0) == doctest::Approx(0.01));
  CHECK(s.level_at(2.999) == doctest::Approx(0.01));
  CHECK(s.level_at(3.0) == doctest::Approx(0.51));
  CHECK(s.level_at(3.999) == doctest::Approx(0.51));
  CHECK(s.level_at(4.0) == doctest::Approx(1.0));
  CHECK(s.final_level() == doctest::Approx(1.0));
}

TEST_CASE("constant reference passes unchanged") {
  const auto s = shape(PiecewiseConstantSignal(2.5), half_turn()).signal;
  CHECK(s.empty());
  CHECK(s.level_at(10.0) == 2.5);
}

TEST_CASE("step-wise reference against dense convolution") {
  const PiecewiseConstantSignal r(0.0, {{0.0, 1.0}, {5.0, -1.0}, {9.0, 0.0}, {12.5, 0.25}});
  const auto d = half_turn();
  const auto s = shape(r, d).signal;
  CHECK(s.events().size() <= 3 * r.events().size());
  const double h = 1e-3;
  const int n = 20000;
  std::vector<std::array<double, 2>> imp;
  for (const auto& i : d.impulses) imp.push_back({i.time, i.amplitude});
  const auto y = oracle::dense_convolution(0.0, steps_of(r), imp, h, n);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(y[k] - s.level_at(k * h)));
  CHECK(worst < 1e-14);
}

TEST_CASE("superposition") {
  const PiecewiseConstantSignal a(0.0, {{0.0, 1.0}, {6.0, -0.5}});
  const PiecewiseConstantSignal b(0.0, {{1.5, 2.0}, {6.0, 0.0}});
  const auto d = half_turn();
  const auto lhs = shape(a + b, d).signal;
  const auto rhs = shape(a, d).signal + shape(b, d).signal;
  for (double t = -1.0; t < 20.0; t += 0.01) CHECK(lhs.level_at(t) == doctest::Approx(rhs.level_at(t)).epsilon(1e-14));
}

TEST_CASE("estimation prefix") {
  const auto p = estimation_prefix(1.0, 0.01, 2.0);
  REQUIRE(p.events().size() == 1);
  CHECK(p.events()[0].time == 0.0);
  CHECK(p.events()[0].level == 0.01);
  CHECK(estimation_prefix(0.0, 0.01, 2.0).empty());
  // only the first impulse has fired before tau + T
  const auto s = shape(PiecewiseConstantSignal::step(1.0), half_turn()).signal;
  for (double t = 0.0; t < 3.0; t += 0.01) CHECK(s.level_at(t) == p.level_at(t));
}

}
