#pragma once

#include <string>

namespace lgrav {

class DensityProfile;

// How the dynamics and observables are scaled by the index n.
//  Raw:               unscaled dynamics, unscaled observation.
//  RescaledDynamics:  gravity g/sqrt(n), density sqrt(n) h; depths already in rescaled units,
//                     skeleton clock n, physical clock n^{3/4}.
//  PowerLawWindow:    raw power-law dynamics observed at space n^{1/(2+2 lambda)},
//                     skeleton clock n, physical clock n^{(3+2 lambda)/(4+4 lambda)}.
struct ScalingRegime {
  enum class Mode { Raw, RescaledDynamics, PowerLawWindow };
  Mode mode = Mode::Raw;
  double n = 1.0;

  static ScalingRegime raw() { return {}; }
  static ScalingRegime rescaled(double n);
  static ScalingRegime window(double n);

  double effective_gravity(double g) const;
  DensityProfile effective_profile(const DensityProfile& h) const;
  // Factor dividing model depths to give the scaled observable.
  double space_scale(double lambda) const;
  // Original-units length of one scaled unit: sqrt(n) for rescaled dynamics,
  // n^{1/(2+2 lambda)} for the power-law window.
  double physical_space_factor(double lambda) const;
  double skeleton_scale() const { return mode == Mode::Raw ? 1.0 : n; }
  double clock_scale(double lambda) const;
  std::string name() const;
};

}  // namespace lgrav
