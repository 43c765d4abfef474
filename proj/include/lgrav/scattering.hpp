#pragma once

#include <vector>

#include "lgrav/density.hpp"
#include "lgrav/dynamics.hpp"
#include "lgrav/regime.hpp"
#include "lgrav/rng.hpp"

namespace lgrav {

// Collision law of a particle in the (possibly rescaled) medium. Flights handed to
// the law must be built with the effective gravity, i.e. through flight()/flight_ud().
class ScatterLaw {
 public:
  ScatterLaw(DensityProfile profile, FlightParams params, ScalingRegime regime = {});

  const DensityProfile& profile() const { return profile_; }
  const DensityProfile& effective_profile() const { return eff_profile_; }
  const FlightParams& params() const { return params_; }
  const ScalingRegime& regime() const { return regime_; }
  double gravity() const { return params_.g; }
  double effective_gravity() const { return g_eff_; }
  int dimension() const { return params_.d; }

  ParabolicFlight flight(double y0, std::vector<double> u) const;
  ParabolicFlight flight_ud(double y0, double ud) const;
  VerticalMotion motion(double y0, double ud) const { return VerticalMotion(y0, ud, g_eff_); }
  // Motion of a flight built by this law; throws if its gravity or dimension differ.
  VerticalMotion motion(const ParabolicFlight& f) const;

  // Primitives on the vertical motion; the public free functions forward here.
  double rate(const VerticalMotion& m, double s) const {
    return eff_profile_.eval(m.depth(s)) * m.speed(s);
  }
  double hazard(const VerticalMotion& m, double t) const;
  double hazard_between(const VerticalMotion& m, double a, double b) const;
  // Smallest t with hazard(t) = E, to |hazard - E| <= 1e-11 max(1, E).
  double invert(const VerticalMotion& m, double E) const;
  // First t with survival(t) < 1e-16.
  double tail_cutoff(const VerticalMotion& m) const;
  double moment(const VerticalMotion& m, int p) const;

 private:
  DensityProfile profile_;
  DensityProfile eff_profile_;
  FlightParams params_;
  ScalingRegime regime_;
  double g_eff_;

  double initial_guess(const VerticalMotion& m, double E) const;
};

double intensity(const ScatterLaw& law, const ParabolicFlight& f, double s);
double cumulative_hazard(const ScatterLaw& law, const ParabolicFlight& f, double t);
double survival(const ScatterLaw& law, const ParabolicFlight& f, double t);
double invert_hazard(const ScatterLaw& law, const ParabolicFlight& f, double E);
double sample_flight_time(const ScatterLaw& law, const ParabolicFlight& f, Rng& rng);

// p-th moment of the flight time from depth y with vertical direction component ud.
double moment_oracle(const ScatterLaw& law, double y, double ud, int p);
// E N(y, u) - E N(y, -u).
double fluctuation_oracle(const ScatterLaw& law, double y, double ud);

// Flight time by thinning on [0, horizon]; +inf when no collision occurs in the window.
// Power-law profiles only (the rate bound uses monotonicity of the rate in depth).
double thinning_flight_time(const ScatterLaw& law, const ParabolicFlight& f, double horizon, Rng& rng);

}  // namespace lgrav
