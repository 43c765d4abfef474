#include "lgrav/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lgrav/quadrature.hpp"

namespace lgrav {

namespace {
constexpr QuadTolerance kHazardTol{1e-300, 1e-12, 2000};
constexpr QuadTolerance kMomentTol{1e-300, 1e-12, 4000};
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

ScatterLaw::ScatterLaw(DensityProfile profile, FlightParams params, ScalingRegime regime)
    : profile_(std::move(profile)),
      eff_profile_(regime.effective_profile(profile_)),
      params_(params),
      regime_(regime),
      g_eff_(regime.effective_gravity(params.g)) {
  if (!(params_.g > 0.0)) throw std::invalid_argument("scatter law: g must be > 0");
  if (params_.d < 1) throw std::invalid_argument("scatter law: d must be >= 1");
  if (regime_.mode == ScalingRegime::Mode::PowerLawWindow && !profile_.is_power_law()) {
    throw std::invalid_argument("scatter law: the power-law window regime requires a power-law profile");
  }
}

ParabolicFlight ScatterLaw::flight(double y0, std::vector<double> u) const {
  return make_flight(y0, std::move(u), FlightParams{g_eff_, params_.d});
}

ParabolicFlight ScatterLaw::flight_ud(double y0, double ud) const {
  return make_flight_ud(y0, ud, FlightParams{g_eff_, params_.d});
}

VerticalMotion ScatterLaw::motion(const ParabolicFlight& f) const {
  if (f.params.g != g_eff_) {
    throw std::invalid_argument("scatter law: flight gravity differs from the law's effective gravity");
  }
  if (f.params.d != params_.d || static_cast<int>(f.u.size()) != params_.d) {
    throw std::invalid_argument("scatter law: flight dimension differs from the law's dimension");
  }
  return VerticalMotion(f.y0, f.ud(), g_eff_);
}

double ScatterLaw::hazard_between(const VerticalMotion& m, double a, double b) const {
  if (b <= a) return 0.0;
  auto f = [&](double s) { return rate(m, s); };
  if (m.apex_time > a && m.apex_time < b) {
    return integrate(f, a, m.apex_time, kHazardTol).value + integrate(f, m.apex_time, b, kHazardTol).value;
  }
  return integrate(f, a, b, kHazardTol).value;
}

double ScatterLaw::hazard(const VerticalMotion& m, double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("cumulative hazard: t must be >= 0");
  return hazard_between(m, 0.0, t);
}

double ScatterLaw::initial_guess(const VerticalMotion& m, double E) const {
  const double r0 = rate(m, 0.0);
  if (r0 > 0.0) return E / r0;
  if (eff_profile_.is_power_law()) {
    // Start at rest at depth 0: hazard = A g^{l+1} t^{2l+2} / (2^l (2l+2)).
    const double l = eff_profile_.lambda();
    const double A = eff_profile_.amplitude();
    return std::pow(E * std::pow(2.0, l) * (2.0 * l + 2.0) / (A * std::pow(m.g, l + 1.0)), 1.0 / (2.0 * l + 2.0));
  }
  return 1.0;
}

double ScatterLaw::invert(const VerticalMotion& m, double E) const {
  if (!(E >= 0.0) || !std::isfinite(E)) throw std::invalid_argument("hazard inversion: E must be finite and >= 0");
  if (E == 0.0) return 0.0;
  const double tol = 1e-11 * std::max(1.0, E);
  double t = initial_guess(m, E);
  const double cap = t * 0x1p60;
  double lo = 0.0, flo = 0.0, hi = kInf;
  for (int it = 0; it < 500; ++it) {
    const double ft = flo + hazard_between(m, lo, t);
    if (std::abs(ft - E) <= tol) return t;
    if (ft < E) {
      lo = t;
      flo = ft;
    } else {
      hi = t;
    }
    if (std::isfinite(hi) && hi - lo <= 4e-16 * hi) return 0.5 * (lo + hi);
    const double r = rate(m, t);
    double next = r > 0.0 ? t + (E - ft) / r : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) {
      if (std::isinf(hi)) {
        next = 2.0 * std::max(t, lo);
        if (next > cap) {
          throw std::runtime_error("hazard inversion: hazard did not reach E within 2^60 times the initial bracket");
        }
      } else {
        next = 0.5 * (lo + hi);
      }
    }
    t = next;
  }
  throw std::runtime_error("hazard inversion: no convergence");
}

double ScatterLaw::tail_cutoff(const VerticalMotion& m) const {
  constexpr double kTarget = 37.0;  // exp(-37) < 1e-16
  double t = initial_guess(m, kTarget);
  const double cap = t * 0x1p60;
  double f = hazard(m, t);
  while (f < kTarget) {
    const double next = 2.0 * t;
    if (next > cap) throw std::runtime_error("tail cutoff: hazard does not grow");
    f += hazard_between(m, t, next);
    t = next;
  }
  return t;
}

double ScatterLaw::moment(const VerticalMotion& m, int p) const {
  if (p < 1) throw std::invalid_argument("moment oracle: p must be >= 1");
  const double T = tail_cutoff(m);
  std::vector<double> pts{0.0};
  if (m.apex_time > 0.0 && m.apex_time < T) pts.push_back(m.apex_time);
  pts.push_back(T);
  auto integrand = [&](double t) {
    const double s = std::exp(-hazard(m, t));
    return p == 1 ? s : p * std::pow(t, p - 1) * s;
  };
  return integrate_pieces(integrand, pts, kMomentTol).value;
}

double intensity(const ScatterLaw& law, const ParabolicFlight& f, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("intensity: s must be >= 0");
  return law.rate(law.motion(f), s);
}

double cumulative_hazard(const ScatterLaw& law, const ParabolicFlight& f, double t) {
  return law.hazard(law.motion(f), t);
}

double survival(const ScatterLaw& law, const ParabolicFlight& f, double t) {
  return std::exp(-cumulative_hazard(law, f, t));
}

double invert_hazard(const ScatterLaw& law, const ParabolicFlight& f, double E) {
  return law.invert(law.motion(f), E);
}

double sample_flight_time(const ScatterLaw& law, const ParabolicFlight& f, Rng& rng) {
  return law.invert(law.motion(f), rng.exponential());
}

double moment_oracle(const ScatterLaw& law, double y, double ud, int p) {
  if (!(y <= 0.0)) throw std::invalid_argument("moment oracle: y must be <= 0");
  return law.moment(law.motion(y, ud), p);
}

double fluctuation_oracle(const ScatterLaw& law, double y, double ud) {
  if (!(y < 0.0)) throw std::invalid_argument("fluctuation oracle: y must be < 0");
  if (ud == 0.0) return 0.0;
  return moment_oracle(law, y, ud, 1) - moment_oracle(law, y, -ud, 1);
}

double thinning_flight_time(const ScatterLaw& law, const ParabolicFlight& f, double horizon, Rng& rng) {
  if (!law.effective_profile().is_power_law()) {
    throw std::invalid_argument("thinning: rate bound needs a power-law profile");
  }
  const VerticalMotion m = law.motion(f);
  // The rate is increasing in |depth|, and |depth| is convex in time, so the window max is at an end.
  const double bound = std::max(law.rate(m, 0.0), law.rate(m, horizon)) * (1.0 + 1e-12);
  if (!(bound > 0.0)) return kInf;
  double t = 0.0;
  for (;;) {
    t += rng.exponential() / bound;
    if (t > horizon) return kInf;
    if (rng.uniform() * bound <= law.rate(m, t)) return t;
  }
}

}  // namespace lgrav
