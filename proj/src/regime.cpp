#include "lgrav/regime.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lgrav/density.hpp"

namespace lgrav {

namespace {
double checked_index(double n) {
  if (!(n >= 1.0) || !std::isfinite(n)) throw std::invalid_argument("regime: n must be >= 1");
  return n;
}
}  // namespace

ScalingRegime ScalingRegime::rescaled(double n) { return {Mode::RescaledDynamics, checked_index(n)}; }
ScalingRegime ScalingRegime::window(double n) { return {Mode::PowerLawWindow, checked_index(n)}; }

double ScalingRegime::effective_gravity(double g) const {
  return mode == Mode::RescaledDynamics ? g / std::sqrt(n) : g;
}

DensityProfile ScalingRegime::effective_profile(const DensityProfile& h) const {
  return mode == Mode::RescaledDynamics ? h.rescaled(n) : h;
}

double ScalingRegime::space_scale(double lambda) const {
  return mode == Mode::PowerLawWindow ? std::pow(n, 1.0 / (2.0 + 2.0 * lambda)) : 1.0;
}

double ScalingRegime::physical_space_factor(double lambda) const {
  switch (mode) {
    case Mode::Raw: return 1.0;
    case Mode::RescaledDynamics: return std::sqrt(n);
    case Mode::PowerLawWindow: return space_scale(lambda);
  }
  return 1.0;
}

double ScalingRegime::clock_scale(double lambda) const {
  switch (mode) {
    case Mode::Raw: return 1.0;
    case Mode::RescaledDynamics: return std::pow(n, 0.75);
    case Mode::PowerLawWindow: return std::pow(n, (3.0 + 2.0 * lambda) / (4.0 + 4.0 * lambda));
  }
  return 1.0;
}

std::string ScalingRegime::name() const {
  std::ostringstream os;
  os.precision(17);
  switch (mode) {
    case Mode::Raw: return "raw";
    case Mode::RescaledDynamics: os << "rescaled(n=" << n << ")"; break;
    case Mode::PowerLawWindow: os << "window(n=" << n << ")"; break;
  }
  return os.str();
}

}  // namespace lgrav
