#include <cmath>
#include <vector>

#include "doctest.h"
#include "lgrav/config.hpp"
#include "lgrav/diffusion.hpp"
#include "lgrav/stats.hpp"

using namespace lgrav;

TEST_CASE("skeleton generator") {
  const GeneratorSpec a = skeleton_generator(DensityProfile::constant(1), 2);
  CHECK(a.a(-1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(a.b(-1) == doctest::Approx(-0.25).epsilon(1e-14));
  const GeneratorSpec b = skeleton_generator(DensityProfile::constant(2), 3);
  CHECK(b.a(-4) == doctest::Approx(1.0 / 12).epsilon(1e-14));
  CHECK(b.b(-4) == doctest::Approx(-1.0 / 48).epsilon(1e-14));
}

TEST_CASE("skeleton generator of a power law is Bessel-like") {
  // b / a * 2|y| = -(d-1-2 lambda): dimension (d-1-2 lambda)/2 + 1 in the Lamperti sense.
  for (double lambda : {0.0, 0.5, 1.0, 2.0}) {
    const GeneratorSpec g = skeleton_generator(DensityProfile::power_law(1.7, lambda), 3);
    for (double y : {-0.3, -2.0, -9.0}) {
      CHECK(g.b(y) / g.a(y) * 2.0 * std::abs(y) == doctest::Approx(-(3.0 - 1.0 - 2.0 * lambda)).epsilon(1e-12));
    }
  }
}

TEST_CASE("natural generator") {
  for (double lambda : {0.0, 1.0, 2.5}) {
    const GeneratorSpec g = natural_generator(DensityProfile::power_law(1, lambda), 2, 0.5, ScalingRegime::Mode::Raw);
    CHECK(g.a(-1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(g.b(-1) == doctest::Approx(-0.25).epsilon(1e-14));
  }
  const GeneratorSpec c = natural_generator(DensityProfile::constant(1), 2, 0.5);
  CHECK(c.a(-1) == doctest::Approx(0.5).epsilon(1e-14));
  // Time change: natural = skeleton * sqrt(2 g |y|) h(y).
  for (const DensityProfile& h : {DensityProfile::power_law(1.3, 0.7), inverse_tail_profile()}) {
    const GeneratorSpec s = skeleton_generator(h, 3), n = natural_generator(h, 3, 0.8);
    for (double y : {-0.2, -1.0, -4.5}) {
      const double rate = std::sqrt(2 * 0.8 * std::abs(y)) * h.eval(y);
      CHECK(std::abs(n.a(y) - s.a(y) * rate) <= 1e-12 * std::abs(n.a(y)));
      CHECK(std::abs(n.b(y) - s.b(y) * rate) <= 1e-12 * std::abs(n.b(y)));
    }
  }
}

TEST_CASE("scale function and speed") {
  const ScaleSpeed flat(DensityProfile::constant(1), 2);
  CHECK(flat.G(-4) == doctest::Approx(-2.0).epsilon(1e-10));
  for (double y : {-0.3, -2.0, -17.0}) CHECK(flat.G(y) == doctest::Approx(2 - 2 * std::sqrt(-y)).epsilon(1e-10));
  const ScaleSpeed::Kappa k = flat.kappa_at_zero();
  CHECK(k.finite);
  CHECK(std::abs(k.value - 2.0) < 1e-6);
  CHECK_FALSE(ScaleSpeed(inverse_tail_profile(), 2).kappa_at_zero().finite);
}

TEST_CASE("scale function is harmonic") {
  for (const DensityProfile& h :
       {DensityProfile::constant(1), DensityProfile::power_law(1, 1), DensityProfile::power_law(2, 0.5), inverse_tail_profile()}) {
    for (int d : {1, 2, 4}) {
      const ScaleSpeed ss(h, d);
      const GeneratorSpec g = skeleton_generator(h, d);
      for (double y : {-0.05, -0.5, -3.0, -20.0}) CHECK(ss.harmonicity_residual(g, y) < 1e-6);
    }
  }
}

TEST_CASE("Bessel maps") {
  const BesselMap rn = bessel_map(BesselRepresentation::RescaledNatural, 0.0, 2);
  CHECK(rn.delta == doctest::Approx(4.0 / 3).epsilon(1e-14));
  CHECK(rn.c == doctest::Approx(4.0 / 3).epsilon(1e-14));
  const BesselMap raw0 = bessel_map(BesselRepresentation::RawSkeleton, 0.0, 2);
  CHECK(raw0.delta == doctest::Approx(1.5));
  CHECK(raw0.radius(-2.5) == doctest::Approx(2.5));
  const BesselMap raw1 = bessel_map(BesselRepresentation::RawSkeleton, 1.0, 2);
  CHECK(raw1.delta == doctest::Approx(1.75));
  CHECK(raw1.clock == doctest::Approx(1.0));
  CHECK(raw1.radius(-2.0) == doctest::Approx(2.0));  // |y|^2 / 2
  CHECK(raw1.depth(raw1.radius(-3.3)) == doctest::Approx(-3.3));
  const BesselMap alt = bessel_map(BesselRepresentation::RawSkeletonFromRescaled, 1.0, 2);
  CHECK(alt.delta == doctest::Approx(1.25));
  CHECK(bessel_map(0.0, 2, ScalingRegime::Mode::RescaledDynamics).delta == doctest::Approx(4.0 / 3));
}

TEST_CASE("mapped Bessel generators reproduce the limit generators") {
  const BesselMap s = bessel_map(BesselRepresentation::RescaledSkeleton, 0.0, 2);
  const GeneratorSpec ms = mapped_bessel_generator(s), sk = skeleton_generator(DensityProfile::constant(1), 2);
  for (double y : {-0.1, -1.0, -7.0}) {
    CHECK(ms.a(y) == doctest::Approx(sk.a(y)).epsilon(1e-12));
    CHECK(ms.b(y) == doctest::Approx(sk.b(y)).epsilon(1e-12));
  }
  for (double lambda : {0.0, 1.0, 1.5}) {
    const double c = 1.5, g = 0.7;
    const int d = 3;
    const DensityProfile h = DensityProfile::power_law(c, lambda);
    const GeneratorSpec nat = natural_generator(h, d, g);
    const GeneratorSpec mn = mapped_bessel_generator(bessel_map(BesselRepresentation::RescaledNatural, lambda, d, c, g));
    const GeneratorSpec skel = skeleton_generator(h, d);
    const GeneratorSpec msk = mapped_bessel_generator(bessel_map(BesselRepresentation::RescaledSkeleton, lambda, d, c, g));
    for (double y : {-0.2, -1.0, -5.0}) {
      CHECK(mn.a(y) == doctest::Approx(nat.a(y)).epsilon(1e-12));
      CHECK(mn.b(y) == doctest::Approx(nat.b(y)).epsilon(1e-12));
      CHECK(msk.a(y) == doctest::Approx(skel.a(y)).epsilon(1e-12));
      CHECK(msk.b(y) == doctest::Approx(skel.b(y)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Bessel sampler") {
  Rng rng(31);
  SUBCASE("dimension 1 from 0") {
    MomentAccumulator acc;
    for (int i = 0; i < 100000; ++i) {
      const double x = bessel_step(1.0, 0.0, 0.7, rng);
      acc.add(x * x);
    }
    CHECK(acc.mean() == doctest::Approx(0.7).epsilon(0.02));
  }
  SUBCASE("dimension 3 from 0") {
    const double t = 1.3;
    std::vector<double> xs(100000);
    for (double& x : xs) x = bessel_step(3.0, 0.0, t, rng);
    const KsResult ks = ks_one_sample(xs, [t](double x) {
      const double z = x / std::sqrt(t);
      return std::erf(z / std::sqrt(2.0)) - std::sqrt(2.0 / M_PI) * z * std::exp(-z * z / 2);
    });
    CHECK(ks.statistic < 0.01);
  }
  SUBCASE("dimension 3/2 from 1") {
    MomentAccumulator acc;
    for (int i = 0; i < 100000; ++i) {
      const double x = bessel_step(1.5, 1.0, 0.4, rng);
      acc.add(x * x);
    }
    CHECK(std::abs(acc.mean() - (1.0 + 1.5 * 0.4)) < 3 * acc.std_error());
  }
  SUBCASE("paths are consistent with single steps") {
    std::vector<double> a(20000), b(20000);
    for (double& x : a) x = sample_bessel_path(2.5, 0.5, {0.3, 0.6, 1.0}, rng).back();
    for (double& x : b) x = bessel_step(2.5, 0.5, 1.0, rng);
    CHECK(ks_two_sample(a, b).pass);
  }
  SUBCASE("absorbing paths stay at 0") {
    int absorbed = 0;
    for (int i = 0; i < 2000; ++i) {
      const std::vector<double> p = sample_bessel_path(0.5, 0.2, {0.5, 1.0, 2.0, 4.0}, rng);
      for (std::size_t k = 1; k < p.size(); ++k) {
        if (p[k - 1] == 0.0) CHECK(p[k] == 0.0);
      }
      absorbed += p.back() == 0.0;
    }
    CHECK(absorbed > 0);
  }
}

TEST_CASE("Euler-Maruyama, Brownian case") {
  GeneratorSpec bm{[](double) { return 0.5; }, [](double) { return 0.0; }, "bm"};
  Rng rng(5);
  std::vector<double> ys(100000);
  for (double& y : ys) y = euler_maruyama(bm, -100, 1e-2, 1.0, -1.0, rng).y.back();
  CHECK(ks_one_sample(ys, [](double y) { return 0.5 * std::erfc(-(y + 100) / std::sqrt(2.0)); }).statistic < 0.01);
}

TEST_CASE("Euler-Maruyama on the skeleton generator matches the mapped Bessel sampler") {
  // h = 1, d = 2 from -1 to t = 0.25, both stopped at -0.05.
  const double v = -0.05, t = 0.25;
  const GeneratorSpec g = skeleton_generator(DensityProfile::constant(1), 2);
  const BesselMap map = bessel_map(BesselRepresentation::RescaledSkeleton, 0.0, 2);
  Rng rng(13);
  std::vector<double> em(20000), ref(20000), half(20000);
  for (double& y : em) y = euler_maruyama(g, -1, 2.5e-4, t, v, rng).y.back();
  for (double& y : half) y = euler_maruyama(g, -1, 1.25e-4, t, v, rng).y.back();
  for (double& y : ref) {
    const StoppedBessel s = sample_bessel_stopped(map.delta, map.radius(-1), map.radius(v), map.clock * t, 1000, rng);
    y = s.stopped ? v : std::min(map.depth(s.value), v);
  }
  CHECK(ks_two_sample(em, ref).pass);
  CHECK(ks_two_sample(em, half).pass);
}
