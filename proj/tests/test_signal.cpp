#include <doctest.h>

#include <cmath>

#include "atdf/error.hpp"
#include "atdf/signal.hpp"

using namespace atdf;

TEST_SUITE("signal") {

TEST_CASE("levels are right-continuous") {
  const PiecewiseConstantSignal s(0.0, {{0.0, 1.0}, {2.0, -1.0}, {3.5, 0.0}});
  CHECK(s.level_at(-1.0) == 0.0);
  CHECK(s.level_at(0.0) == 1.0);
  CHECK(s.level_at(1.999) == 1.0);
  CHECK(s.level_at(2.0) == -1.0);
  CHECK(s.level_at(100.0) == 0.0);
  CHECK(s.final_level() == 0.0);
}

TEST_CASE("event times must be finite, non-negative and increasing") {
  CHECK_THROWS_AS(PiecewiseConstantSignal(0.0, {{1.0, 1.0}, {1.0, 2.0}}), Error);
  CHECK_THROWS_AS(PiecewiseConstantSignal(0.0, {{2.0, 1.0}, {1.0, 2.0}}), Error);
  CHECK_THROWS_AS(PiecewiseConstantSignal(0.0, {{-1.0, 1.0}}), Error);
  CHECK_THROWS_AS(PiecewiseConstantSignal(0.0, {{std::nan(""), 1.0}}), Error);
}

TEST_CASE("increments merge at coincident times and cancel") {
  const auto s = signal_from_increments(0.0, {{3.0, 0.5}, {0.0, 0.01}, {3.0, -0.5}, {4.0, 0.49}});
  REQUIRE(s.events().size() == 2);
  CHECK(s.events()[0].time == 0.0);
  CHECK(s.events()[0].level == doctest::Approx(0.01));
  CHECK(s.events()[1].time == 4.0);
  CHECK(s.events()[1].level == doctest::Approx(0.5));
}

TEST_CASE("sum and scaling act pointwise") {
  const auto a = PiecewiseConstantSignal::step(1.0);
  const auto b = PiecewiseConstantSignal(0.0, {{1.0, 2.0}, {3.0, 0.0}});
  const auto c = a + b.scaled(-0.5);
  for (double t : {-0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 9.0}) {
    CHECK(c.level_at(t) == doctest::Approx(a.level_at(t) - 0.5 * b.level_at(t)));
  }
}

TEST_CASE("time series grid") {
  TimeSeries ts{0.5, 0.25, {1, 2, 3}};
  CHECK(ts.time(2) == 1.0);
  CHECK(ts.end_time() == 1.0);
}

}
