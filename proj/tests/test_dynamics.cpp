#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "lgrav/dynamics.hpp"
#include "lgrav/rng.hpp"

using namespace lgrav;

namespace {

ParabolicFlight flight(double y0, double ud, double g, int d = 2) { return make_flight_ud(y0, ud, FlightParams{g, d}); }

// Riemann-midpoint arc length, independent of the closed form.
double riemann_arc(const ParabolicFlight& f, double t, int steps) {
  double s = 0.0;
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) s += flight_speed(f, (i + 0.5) * h);
  return s * h;
}

double bisect(double lo, double hi, const auto& f) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("flight depth") {
  CHECK(flight_depth(flight(-1, 0, 2), 0.0) == -1.0);
  CHECK(flight_depth(flight(-1, 1, 2), 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(flight_depth(flight(-2, -1, 2), 1.0) == doctest::Approx(-2.0 - std::sqrt(8.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("flight speed") {
  CHECK(flight_speed(flight(-1, 1, 2), 1.0) == doctest::Approx(0.0));
  CHECK(flight_speed(flight(-2, 0, 2), 0.0) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));
  CHECK(flight_speed(flight(-2, -1, 2), 1.0) == doctest::Approx(std::sqrt(8.0) + 2.0).epsilon(1e-15));
}

TEST_CASE("arc length") {
  CHECK(arc_length(flight(-3, 0.4, 2), 0.0) == 0.0);
  CHECK(arc_length(flight(-2, -1, 2), 1.0) == doctest::Approx(std::sqrt(8.0) + 1.0).epsilon(1e-14));
  const ParabolicFlight f = flight(-4, 0, 2);
  CHECK(std::abs(arc_length(f, 0.5) - riemann_arc(f, 0.5, 1000000)) < 1e-8);
  // Through the apex.
  const ParabolicFlight up = flight(-3, 0.8, 1.5, 3);
  CHECK(std::abs(arc_length(up, 3.0) - riemann_arc(up, 3.0, 1000000)) < 1e-8);
}

TEST_CASE("unit step time") {
  const FlightParams p{2.0, 2};
  CHECK(unit_step_time(-4, 1.0, p) == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-14));
  CHECK(unit_step_time(-4, -1.0, p) == doctest::Approx(std::sqrt(5.0) - 2.0).epsilon(1e-14));
  const ParabolicFlight f = flight(-4, 0, 2);
  const double root = bisect(0.0, 1.0, [&](double t) { return riemann_arc(f, t, 20000) - 1.0; });
  CHECK(std::abs(unit_step_time(-4, 0.0, p) - root) < 1e-10);
  CHECK_THROWS_AS(unit_step_time(-0.5, 0.0, p), std::invalid_argument);
}

TEST_CASE("step time differences keep precision at large depth") {
  // n^{3/4}(t(theta) - t(-theta)) -> sin(theta)/sqrt(8 g |y|^3) needs the difference of two nearly equal roots.
  const FlightParams p{2.0, 2};
  const double ud = std::sin(M_PI / 4.0), y = -2.0, n = 1e8;
  const double s = std::pow(n, 0.75) * (unit_step_time(std::sqrt(n) * y, ud, p) - unit_step_time(std::sqrt(n) * y, -ud, p));
  CHECK(s == doctest::Approx(ud / std::sqrt(8.0 * 2.0 * 8.0)).epsilon(1e-6));
}

TEST_CASE("energy identity") {
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const double y0 = -10.0 * rng.uniform(), ud = 2.0 * rng.uniform() - 1.0, g = 0.1 + 3.0 * rng.uniform();
    const ParabolicFlight f = flight(y0, ud, g, 3);
    const double t = 5.0 * rng.uniform();
    const double v = flight_speed(f, t);
    CHECK(std::abs(v * v - 2.0 * g * std::abs(flight_depth(f, t))) <= 1e-9 * (1.0 + v * v));
  }
}

TEST_CASE("advance restarts the same trajectory") {
  const ParabolicFlight f = flight(-2, 0.3, 1.7, 3);
  const ParabolicFlight a = f.advance(0.4);
  for (double t : {0.0, 0.1, 0.7, 2.0}) {
    CHECK(flight_depth(a, t) == doctest::Approx(flight_depth(f, 0.4 + t)).epsilon(1e-12));
    CHECK(arc_length(f, 0.4 + t) == doctest::Approx(arc_length(f, 0.4) + arc_length(a, t)).epsilon(1e-12));
  }
}

TEST_CASE("flight preconditions") {
  CHECK_THROWS_AS(make_flight(-1, {0.6, 0.6}, FlightParams{1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(make_flight(-1, {1.0}, FlightParams{1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(make_flight(0.5, {0.0, 1.0}, FlightParams{1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(make_flight_ud(-1, 0.3, FlightParams{1, 1}), std::invalid_argument);
}
