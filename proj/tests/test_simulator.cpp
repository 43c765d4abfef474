#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "lgrav/diffusion.hpp"
#include "lgrav/simulator.hpp"
#include "lgrav/stats.hpp"

using namespace lgrav;

namespace {

ScatterLaw law(DensityProfile h, double g, int d = 2, ScalingRegime r = {}) { return ScatterLaw(h, FlightParams{g, d}, r); }

}  // namespace

TEST_CASE("direction sampler") {
  Rng rng(1);
  int plus = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::vector<double> u = sample_direction(1, rng);
    CHECK(std::abs(u[0]) == 1.0);
    plus += u[0] > 0;
  }
  CHECK(std::abs(plus / 1e4 - 0.5) < 0.01);
  for (int d : {2, 5}) {
    double s = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const std::vector<double> u = sample_direction(d, rng);
      double norm = 0.0;
      for (double x : u) norm += x * x;
      REQUIRE(std::abs(norm - 1.0) < 1e-12);
      s += u.back() * u.back();
    }
    CHECK(std::abs(s / 1e5 - 1.0 / d) < 0.01);
  }
}

TEST_CASE("single event is the flight depth at the sampled time") {
  const ScatterLaw l = law(DensityProfile::constant(1), 1);
  StoppingSpec stop;
  stop.max_events = 1;
  Rng a(42), b(42);
  const SkeletonRun r1 = run_skeleton(l, -1, stop, a);
  const SkeletonRun r2 = run_skeleton(l, -1, stop, b);
  REQUIRE(r1.records.size() == 2);
  const SkeletonRecord& e = r1.records[1];
  CHECK(e.m == 1);
  CHECK(e.y == doctest::Approx(flight_depth(l.flight_ud(-1, e.ud), e.dt)).epsilon(1e-13));
  CHECK(e.clock == e.dt);
  CHECK(r2.records[1].y == e.y);
  CHECK(r2.records[1].dt == e.dt);
  CHECK(std::isnan(r1.records[0].ud));
}

TEST_CASE("chain stays below the surface") {
  const ScatterLaw l = law(DensityProfile::power_law(1, 1), 1, 3);
  StoppingSpec stop;
  stop.max_events = 20000;
  Rng rng(3);
  const SkeletonRun r = run_skeleton(l, 0, stop, rng);
  for (const SkeletonRecord& e : r.records) CHECK(e.y <= 0.0);
  for (std::size_t i = 1; i < r.records.size(); ++i) CHECK(r.records[i].clock > r.records[i - 1].clock);
}

TEST_CASE("first collision from rest") {
  // h = 1, g = 1: survival exp(-t^2/2), Y1 = -N^2/2, E Y1 = -1.
  const ScatterLaw l = law(DensityProfile::power_law(1, 0), 1);
  Rng rng(9);
  MomentAccumulator acc;
  for (int i = 0; i < 100000; ++i) {
    SkeletonChain c(l, 0.0, rng);
    acc.add(c.step().y);
  }
  CHECK(std::abs(acc.mean() + 1.0) < 3.0 * acc.std_error());
}

TEST_CASE("renewal property") {
  // Increments from depths near -5 reached along a run have the law of fresh one-step increments from -5.
  const ScatterLaw l = law(DensityProfile::constant(1), 1);
  Rng rng(17);
  std::vector<double> along, fresh;
  while (along.size() < 3000) {
    SkeletonChain c(l, -5.0, rng);
    for (int m = 0; m < 30; ++m) {
      const double y = c.current().y;
      const double next = c.step().y;
      if (m > 0 && std::abs(y + 5.0) < 0.05) along.push_back(next - y);
    }
  }
  for (int i = 0; i < 20000; ++i) {
    SkeletonChain c(l, -5.0, rng);
    fresh.push_back(c.step().y + 5.0);
  }
  CHECK(ks_two_sample(along, fresh).pass);
}

TEST_CASE("upper stop") {
  // Rescaled dynamics, h = 1, from -1: the chain reaches -0.5 about as often as a Bessel(3/2) radius
  // from 1 reaches 0.5 within the same skeleton time.
  const double n = 1e3, t = 2.0;
  const ScatterLaw l = law(DensityProfile::constant(1), 1, 2, ScalingRegime::rescaled(n));
  StoppingSpec stop;
  stop.max_events = static_cast<long>(n * t);
  stop.upper = -0.5;
  Rng rng(21);
  const int paths = 1000;
  int hit = 0;
  for (int i = 0; i < paths; ++i) {
    const SkeletonRun r = run_skeleton(l, -1, stop, rng);
    if (r.hit_upper) {
      CHECK(r.records.back().y >= -0.5);
      ++hit;
    }
  }
  const BesselMap map = bessel_map(BesselRepresentation::RescaledSkeleton, 0.0, 2);
  int ref = 0;
  for (int i = 0; i < 4000; ++i) ref += sample_bessel_stopped(map.delta, 1.0, 0.5, map.clock * t, 2000, rng).stopped;
  const double p = hit / double(paths), q = ref / 4000.0;
  const double se = std::sqrt(p * (1 - p) / paths + q * (1 - q) / 4000.0);
  CHECK(std::abs(p - q) < 3.0 * se);
  CHECK(p > 0.5);
}

TEST_CASE("full path interpolation") {
  const ScatterLaw l = law(DensityProfile::constant(1), 2);
  StoppingSpec stop;
  stop.max_events = 5;
  Rng rng(4);
  const SkeletonRun r = run_skeleton(l, -2, stop, rng);
  for (std::size_t m = 0; m < r.records.size(); ++m) {
    CHECK(full_path_eval(r.records, 2, r.records[m].clock) == doctest::Approx(r.records[m].y).epsilon(1e-12));
  }
  const SkeletonRecord& e = r.records[1];
  CHECK(full_path_eval(r.records, 2, e.dt / 2) == doctest::Approx(flight_depth(l.flight_ud(-2, e.ud), e.dt / 2)));
  // Straight-down flight.
  std::vector<SkeletonRecord> down{{0, -2.0, 0.0, 0.0, std::nan("")}, {1, 0.0, 0.5, 0.5, -1.0}};
  down[1].y = flight_depth(make_flight_ud(-2, -1, {2, 2}), 0.5);
  CHECK(full_path_eval(down, 2, 0.25) == doctest::Approx(flight_depth(make_flight_ud(-2, -1, {2, 2}), 0.25)));
}

TEST_CASE("psi_v") {
  const DensityProfile h = DensityProfile::constant(2);
  std::vector<double> s{0.0, 0.5, 1.0}, f{-3.0, -3.0, -3.0};
  const std::vector<double> p = psi_v(s, f, h, 1.5, -0.5);
  CHECK(p.back() == doctest::Approx(1.0 / (std::sqrt(2 * 1.5 * 3.0) * 2.0)));
}

TEST_CASE("clock profile continues with the v slope after the stop") {
  const double n = 1e3, v = -0.5;
  const ScatterLaw l = law(DensityProfile::constant(1), 1, 2, ScalingRegime::rescaled(n));
  StoppingSpec stop;
  stop.max_events = 100000;
  stop.upper = v;
  Rng rng(2);
  const SkeletonRun r = run_skeleton(l, -0.6, stop, rng);
  REQUIRE(r.hit_upper);
  const PiecewiseLinear c = clock_profile(r, l, v);
  const PiecewiseLinear p = psi_profile(r, l, v);
  const double slope = 1.0 / std::sqrt(2.0 * 1.0 * 0.5);
  CHECK(c.tail_slope == doctest::Approx(slope));
  CHECK(p.tail_slope == doctest::Approx(slope));
  const double end = c.s.back();
  CHECK(c(end + 1.0) - c(end) == doctest::Approx(slope));
}

TEST_CASE("right-continuous inverse") {
  PiecewiseLinear f{{0.0, 10.0}, {0.0, 20.0}, 2.0};
  for (double t : {0.0, 1.0, 7.5}) CHECK(right_continuous_inverse(f, t) == doctest::Approx(t / 2));
  PiecewiseLinear step{{0.0, 1.0, 1.0}, {0.0, 0.0, 3.0}, 0.0};
  for (double t : {0.0, 1.0, 2.9}) CHECK(right_continuous_inverse(step, t) == doctest::Approx(1.0));
  CHECK(std::isinf(right_continuous_inverse(step, 3.0)));
  // Double inversion of a strictly increasing function.
  Rng rng(8);
  PiecewiseLinear g;
  double x = 0.0, y = 0.0;
  for (int i = 0; i < 200; ++i) {
    g.s.push_back(x);
    g.f.push_back(y);
    x += 0.01 + rng.uniform();
    y += 0.01 + rng.uniform();
  }
  g.tail_slope = 1.0;
  const PiecewiseLinear back = inverse_function(inverse_function(g));
  for (double s = 0.0; s < x; s += 0.37) CHECK(back(s) == doctest::Approx(g(s)).epsilon(1e-10));
}

TEST_CASE("occupation clock") {
  std::vector<double> s, f;
  for (int i = 0; i <= 100; ++i) {
    s.push_back(i * 0.01);
    f.push_back(-1.0);
  }
  CHECK(occupation_clock(s, f, 0.5, 0.0, 1.0, 0.5).back() == doctest::Approx(1.0));
  std::vector<double> high(f.size(), -0.2);
  CHECK(occupation_clock(s, high, 0.5, 0.0, 1.0, 0.5).back() == 0.0);
  // Grid refinement converges.
  auto walk = [&](int n) {
    std::vector<double> t(n + 1), y(n + 1);
    y[0] = -1.0;
    for (int i = 1; i <= n; ++i) {
      t[i] = double(i) / n;
      y[i] = -1.0 - 0.5 * std::sin(7.0 * t[i]) - 0.3 * t[i];
    }
    return occupation_clock(t, y, 0.1, 1.0, 1.0, 0.5).back();
  };
  const double a = walk(100), b = walk(1000), c = walk(10000);
  CHECK(std::abs(c - b) < std::abs(b - a));
  CHECK(std::abs(c - b) < 1e-4);
}

TEST_CASE("jsonl records") {
  std::vector<SkeletonRecord> p{{0, -1.0, 0.0, 0.0, std::nan("")}, {1, -1.5, 0.25, 0.25, -0.5}};
  std::ostringstream all, tail;
  write_jsonl(all, p);
  write_jsonl(tail, p, 3, true);
  CHECK(all.str() == "{\"m\":0,\"Y\":-1,\"dt\":0,\"T\":0,\"u_d\":null}\n{\"m\":1,\"Y\":-1.5,\"dt\":0.25,\"T\":0.25,\"u_d\":-0.5}\n");
  CHECK(tail.str() == "{\"path\":3,\"m\":1,\"Y\":-1.5,\"dt\":0.25,\"T\":0.25,\"u_d\":-0.5}\n");
}
