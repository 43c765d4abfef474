#include <cmath>

#include "doctest.h"
#include "lgrav/config.hpp"
#include "lgrav/density.hpp"
#include "lgrav/regime.hpp"

using namespace lgrav;

TEST_CASE("eval") {
  CHECK(DensityProfile::power_law(1, 1).eval(-2) == 2.0);
  CHECK(DensityProfile::constant(3).eval(-0.5) == 3.0);
  CHECK(DensityProfile::power_law(2, 0.5).eval(-4) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("derivative") {
  CHECK(DensityProfile::power_law(1, 1).derivative(-2) == -1.0);
  CHECK(DensityProfile::constant(3).derivative(-1) == 0.0);
  const DensityProfile h = DensityProfile::power_law(1, 2);
  const double e = 1e-5;
  const double fd = (h.eval(-3 + e) - h.eval(-3 - e)) / (2 * e);
  CHECK(h.derivative(-3) == doctest::Approx(-6.0));
  CHECK(h.derivative(-3) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("rescaling") {
  CHECK(DensityProfile::constant(1).rescaled(4).eval(-0.3) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(DensityProfile::power_law(1, 1).rescaled(9).eval(-2) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(DensityProfile::power_law(2, 0.5).rescaled(16).derivative(-1) == doctest::Approx(-4.0).epsilon(1e-15));
  const DensityProfile h = DensityProfile::power_law(1.3, 0.7);
  CHECK(h.rescaled(3).rescaled(5).eval(-2.2) == h.rescaled(15).eval(-2.2));
  CHECK(h.rescaled(3).rescaled(5).index() == 15.0);
}

TEST_CASE("positivity witness") {
  for (const DensityProfile& h :
       {DensityProfile::constant(0.7), DensityProfile::power_law(2, 1.5), inverse_tail_profile()}) {
    for (double a : {-0.1, -1.0, -3.0}) {
      for (double y = a; y > a - 20.0; y -= 0.37) CHECK(h.eval(y) >= h.lower_bound(a));
    }
  }
}

TEST_CASE("inverse-tail profile is C1 at the junction") {
  const DensityProfile h = inverse_tail_profile();
  CHECK(h.eval(-1.0) == doctest::Approx(1.0));
  CHECK(h.eval(-1.0 - 1e-9) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(h.derivative(-1.0) == doctest::Approx(h.derivative(-1.0 - 1e-12)).epsilon(1e-9));
  CHECK(h.eval(-0.25) == doctest::Approx(4.0));
}

TEST_CASE("invalid profiles") {
  CHECK_THROWS(DensityProfile::constant(0.0));
  CHECK_THROWS(DensityProfile::power_law(1.0, -0.5));
  CHECK_THROWS(DensityProfile::constant(1.0).rescaled(0.0));
}

TEST_CASE("regimes") {
  const ScalingRegime r = ScalingRegime::rescaled(1e4);
  CHECK(r.effective_gravity(1.0) == doctest::Approx(1e-2));
  CHECK(r.effective_profile(DensityProfile::constant(1)).eval(-1) == doctest::Approx(100.0));
  CHECK(r.skeleton_scale() == 1e4);
  CHECK(r.clock_scale(0.0) == doctest::Approx(1e3));
  const ScalingRegime w = ScalingRegime::window(1e4);
  CHECK(w.space_scale(1.0) == doctest::Approx(10.0));
  CHECK(w.effective_gravity(2.0) == 2.0);
  CHECK(ScalingRegime::raw().space_scale(1.0) == 1.0);
}
