#include <cmath>
#include <vector>

#include "doctest.h"
#include "lgrav/scattering.hpp"
#include "lgrav/stats.hpp"

using namespace lgrav;

namespace {

ScatterLaw law(DensityProfile h, double g, int d = 2, ScalingRegime r = {}) { return ScatterLaw(h, FlightParams{g, d}, r); }

// Composite Simpson on [a, b].
double simpson(const auto& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// E N for a vertical flight from y0 < 0 with h = |y|, as an integral over the depth w = |y|:
// the hazard is (w^2 - y0^2)/2 descending, (y0^2 - w^2)/2 ascending and (y0^2 + w^2)/2 after the
// apex at 0, and dt = dw / sqrt(2 g w). Substituting w = r^2 removes the endpoint singularity.
double vertical_mean_time(double y0, bool up, double g) {
  const double x = std::abs(y0), k = 2.0 / std::sqrt(2.0 * g);
  if (!up) {
    return simpson([&](double s) { return std::exp(-(2.0 * x * s + s * s) / 2.0) / std::sqrt(2.0 * g * (x + s)); }, 0.0,
                   60.0 / x, 400000);
  }
  const double rising = simpson([&](double r) { return k * std::exp(-(x * x - r * r * r * r) / 2.0); }, 0.0,
                                std::sqrt(x), 400000);
  const double falling = simpson([&](double r) { return k * std::exp(-(x * x + r * r * r * r) / 2.0); }, 0.0, 4.0,
                                 4000);
  return rising + falling;
}

}  // namespace

TEST_CASE("intensity") {
  CHECK(intensity(law(DensityProfile::constant(1), 2), make_flight_ud(-2, -1, {2, 2}), 0.0) ==
        doctest::Approx(std::sqrt(8.0)));
  CHECK(intensity(law(DensityProfile::power_law(1, 1), 2), make_flight_ud(-1, 1, {2, 2}), 1.0) ==
        doctest::Approx(0.0));
  CHECK(intensity(law(DensityProfile::constant(2), 2), make_flight_ud(-1, 0, {2, 2}), 0.0) == doctest::Approx(4.0));
}

TEST_CASE("cumulative hazard and survival") {
  const ScatterLaw l = law(DensityProfile::constant(1), 2);
  const ParabolicFlight f = l.flight_ud(-2, -1);
  CHECK(cumulative_hazard(l, f, 1.0) == doctest::Approx(std::sqrt(8.0) + 1.0).epsilon(1e-12));
  CHECK(cumulative_hazard(l, f, 0.0) == 0.0);
  CHECK(survival(l, f, 0.0) == 1.0);
  CHECK(survival(l, f, 1.0) == doctest::Approx(std::exp(-std::sqrt(8.0) - 1.0)).epsilon(1e-12));
  CHECK(survival(l, f, 1.0) == doctest::Approx(0.02178).epsilon(1e-3));
  // From rest at 0 with h = 1: hazard g t^2 / 2.
  const ScatterLaw l0 = law(DensityProfile::power_law(1, 0), 1);
  CHECK(cumulative_hazard(l0, l0.flight_ud(0, -1), 2.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(survival(l0, l0.flight_ud(0, -1), 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("hazard inversion") {
  const ScatterLaw l = law(DensityProfile::constant(1), 2);
  const ParabolicFlight f = l.flight_ud(-2, -1);
  CHECK(invert_hazard(l, f, 0.0) == 0.0);
  CHECK(invert_hazard(l, f, std::sqrt(8.0) + 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  const ScatterLaw p = law(DensityProfile::power_law(1.5, 1.5), 0.7, 3);
  const ParabolicFlight q = p.flight_ud(-3, 0.6);
  for (double E : {0.01, 0.5, 2.0, 10.0, 40.0}) {
    CHECK(cumulative_hazard(p, q, invert_hazard(p, q, E)) == doctest::Approx(E).epsilon(1e-10));
  }
}

TEST_CASE("sampled flight times from rest follow exp(-t^2/2)") {
  const ScatterLaw l = law(DensityProfile::power_law(1, 0), 1);
  const ParabolicFlight f = l.flight_ud(0, -1);
  Rng rng(11);
  std::vector<double> s(100000);
  for (double& x : s) x = sample_flight_time(l, f, rng);
  const KsResult ks = ks_one_sample(s, [](double t) { return 1.0 - std::exp(-t * t / 2.0); });
  CHECK(ks.statistic < 0.006);
}

TEST_CASE("sampled flight times match survival") {
  const ScatterLaw l = law(DensityProfile::power_law(0.8, 1.0), 1.3, 3);
  const ParabolicFlight f = l.flight_ud(-1.5, 0.7);
  Rng rng(12);
  std::vector<double> s(100000);
  for (double& x : s) x = sample_flight_time(l, f, rng);
  CHECK(ks_one_sample(s, [&](double t) { return 1.0 - survival(l, f, t); }).pass);
}

TEST_CASE("thinning and inversion agree in law") {
  const ScatterLaw l = law(DensityProfile::power_law(1, 1), 1);
  const ParabolicFlight f = l.flight_ud(-2, 0.5);
  const double horizon = l.tail_cutoff(l.motion(f));
  Rng a(3), b(4);
  std::vector<double> x(20000), y(20000);
  for (double& v : x) v = sample_flight_time(l, f, a);
  for (double& v : y) v = thinning_flight_time(l, f, horizon, b);
  CHECK(ks_two_sample(x, y).pass);
}

TEST_CASE("moment oracle") {
  // n^{1/4} E N -> 1/(h sqrt(2 g |y|)) = 1 and n^{1/2} E N^2 -> 2.
  double prev = 1e9;
  for (double n : {1e2, 1e4, 1e6}) {
    const ScatterLaw l = law(DensityProfile::constant(1), 0.5, 2, ScalingRegime::rescaled(n));
    const double m1 = std::pow(n, 0.25) * moment_oracle(l, -1, 0.3, 1);
    const double m2 = std::pow(n, 0.5) * moment_oracle(l, -1, 0.3, 2);
    CHECK(std::abs(m1 - 1.0) < prev);
    prev = std::abs(m1 - 1.0);
    if (n == 1e6) {
      CHECK(m1 == doctest::Approx(1.0).epsilon(1e-2));
      CHECK(m2 == doctest::Approx(2.0).epsilon(1e-2));
    }
  }
  const ScatterLaw raw = law(DensityProfile::power_law(1, 1), 1);
  CHECK(std::sqrt(2.0 * 25.0) * 25.0 * moment_oracle(raw, -25, 0.3, 1) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("moment oracle matches Monte Carlo") {
  const ScatterLaw l = law(DensityProfile::power_law(1, 1), 1);
  const ParabolicFlight f = l.flight_ud(-2, 0.4);
  Rng rng(5);
  MomentAccumulator acc;
  for (int i = 0; i < 100000; ++i) acc.add(sample_flight_time(l, f, rng));
  CHECK(std::abs(acc.mean() - moment_oracle(l, -2, 0.4, 1)) < 3.0 * acc.std_error());
}

TEST_CASE("rescaled fluctuation limit") {
  double prev = 1e9;
  for (double n : {1e2, 1e4, 1e6}) {
    const ScatterLaw l = law(DensityProfile::constant(1), 0.5, 2, ScalingRegime::rescaled(n));
    const double err = std::abs(std::pow(n, 0.75) * fluctuation_oracle(l, -1, 1.0) - 1.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-2);
  CHECK(fluctuation_oracle(law(DensityProfile::constant(1), 0.5), -1, 0.0) == 0.0);
}

TEST_CASE("raw fluctuation of a vertical flight with h = |y|") {
  const double g = 1.0;
  const ScatterLaw l = law(DensityProfile::power_law(1, 1), g);
  for (double y : {-5.0, -30.0}) {
    const double oracle = vertical_mean_time(y, true, g) - vertical_mean_time(y, false, g);
    CHECK(fluctuation_oracle(l, y, 1.0) == doctest::Approx(oracle).epsilon(1e-7));
  }
  // The normalized statistic h^2 sqrt(2g|y|^3) (E N(u) - E N(-u)) tends to +3 = 1 + 2 lambda.
  const double y = -300.0;
  const double stat = y * y * std::sqrt(2.0 * g * std::pow(-y, 3)) * fluctuation_oracle(l, y, 1.0);
  CHECK(stat == doctest::Approx(3.0).epsilon(1e-3));
}
