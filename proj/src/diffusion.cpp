#include "lgrav/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lgrav/quadrature.hpp"

namespace lgrav {

namespace {

constexpr QuadTolerance kTol{1e-300, 1e-13, 4000};

void check_d(int d) {
  if (d < 1) throw std::invalid_argument("diffusion: d must be >= 1");
}

// Parameters of Y = -b X^c reproducing K|y|^gamma [f''/2 - q/(2|y|) f'] from Bessel(delta).
struct PowerGenerator {
  double K, gamma, q;
};

void fill_power_map(BesselMap& m, const PowerGenerator& p) {
  m.c = 2.0 / (2.0 - p.gamma);
  m.b = std::pow(p.K / (m.c * m.c), m.c / 2.0);
  m.delta = 2.0 + m.c * (p.q - 1.0);
  m.clock = 1.0;
}

}  // namespace

GeneratorSpec skeleton_generator(const DensityProfile& h, int d) {
  check_d(d);
  GeneratorSpec g;
  g.a = [h, d](double y) {
    const double v = h.eval(y);
    return 1.0 / (d * v * v);
  };
  g.b = [h, d](double y) {
    const double v = h.eval(y);
    return -(1.0 / (d * v * v)) * ((d - 1) / (2.0 * std::abs(y)) + h.derivative(y) / v);
  };
  g.label = "skeleton";
  return g;
}

GeneratorSpec natural_generator(const DensityProfile& h, int d, double g, ScalingRegime::Mode mode) {
  check_d(d);
  if (!(g > 0.0)) throw std::invalid_argument("natural generator: g must be > 0");
  if (mode != ScalingRegime::Mode::RescaledDynamics && h.is_power_law()) {
    const double c = h.amplitude();
    const double lambda = h.lambda();
    const double k = std::sqrt(2.0 * g) / (d * c);
    GeneratorSpec out;
    out.a = [k, lambda](double y) { return k * std::pow(std::abs(y), 0.5 - lambda); };
    out.b = [k, lambda, d](double y) {
      const double ay = std::abs(y);
      return -k * std::pow(ay, 0.5 - lambda) * (d - 1) / (2.0 * ay);
    };
    out.label = "natural-power-law";
    return out;
  }
  GeneratorSpec s = skeleton_generator(h, d);
  GeneratorSpec out;
  out.a = [s, h, g](double y) { return s.a(y) * std::sqrt(2.0 * g * std::abs(y)) * h.eval(y); };
  out.b = [s, h, g](double y) { return s.b(y) * std::sqrt(2.0 * g * std::abs(y)) * h.eval(y); };
  out.label = "natural";
  return out;
}

ScaleSpeed::ScaleSpeed(DensityProfile h, int d) : h_(std::move(h)), d_(d) { check_d(d); }

double ScaleSpeed::G_prime(double y) const {
  if (!(y < 0.0)) throw std::domain_error("scale function: y must be < 0");
  return h_.eval(y) / std::pow(std::abs(y), 0.5 * (d_ - 1));
}

double ScaleSpeed::G(double y) const {
  if (!(y < 0.0)) throw std::domain_error("scale function: y must be < 0");
  return integrate([this](double u) { return G_prime(u); }, -1.0, y, kTol).value;
}

double ScaleSpeed::m_density(double y) const {
  if (!(y < 0.0)) throw std::domain_error("speed measure: y must be < 0");
  return d_ * h_.eval(y) * std::pow(std::abs(y), 0.5 * (d_ - 1));
}

ScaleSpeed::Kappa ScaleSpeed::kappa_at_zero(int max_panels) const {
  Kappa out{0.0, false, 0, {}};
  auto m = [this](double s) { return m_density(s); };
  double mass = 0.0;  // int_{-1}^{y_k} m
  int rising = 0;
  for (int k = 0; k < max_panels; ++k) {
    const double a = -std::ldexp(1.0, -k);
    const double b = -std::ldexp(1.0, -k - 1);
    auto outer = [&](double u) { return (mass + integrate(m, a, u, kTol).value) * G_prime(u); };
    const double inc = integrate(outer, a, b, kTol).value;
    mass += integrate(m, a, b, kTol).value;
    out.value += inc;
    out.increments.push_back(inc);
    out.panels = k + 1;
    if (k > 0) {
      const double prev = out.increments[static_cast<std::size_t>(k - 1)];
      rising = inc >= prev ? rising + 1 : 0;
    }
    if (k >= 4 && inc < 1e-12 && rising == 0) {
      out.finite = true;
      return out;
    }
    if (rising >= 8 || out.value > 1e15) {
      out.finite = false;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
  }
  out.finite = false;
  out.value = std::numeric_limits<double>::infinity();
  return out;
}

double ScaleSpeed::harmonicity_residual(const GeneratorSpec& gen, double y) const {
  if (!(y < 0.0)) throw std::domain_error("harmonicity: y must be < 0");
  const double eps = 1e-3 * std::abs(y);
  auto delta = [&](double k) {
    return integrate([this](double u) { return G_prime(u); }, y, y + k * eps, kTol).value;
  };
  const double dm2 = delta(-2), dm1 = delta(-1), dp1 = delta(1), dp2 = delta(2);
  const double g2 = (-dp2 + 16.0 * dp1 + 16.0 * dm1 - dm2) / (12.0 * eps * eps);
  const double g1 = (-dp2 + 8.0 * dp1 - 8.0 * dm1 + dm2) / (12.0 * eps);
  const double ta = gen.a(y) * g2;
  const double tb = gen.b(y) * g1;
  return std::abs(ta + tb) / (std::abs(ta) + std::abs(tb) + 1.0);
}

double BesselMap::depth(double x) const { return -b * std::pow(x, c); }
double BesselMap::radius(double y) const { return std::pow(std::abs(y) / b, 1.0 / c); }

BesselMap bessel_map(BesselRepresentation rep, double lambda, int d, double c, double g) {
  check_d(d);
  if (!(lambda >= 0.0)) throw std::invalid_argument("bessel map: lambda must be >= 0");
  if (!(c > 0.0) || !(g > 0.0)) throw std::invalid_argument("bessel map: c and g must be > 0");
  BesselMap m{rep, 0, 0, 0, 0, 0, false};
  switch (rep) {
    case BesselRepresentation::RescaledNatural:
      fill_power_map(m, {2.0 * std::sqrt(2.0 * g) / (d * c), 0.5 - lambda, (d - 1 - 2.0 * lambda) / 2.0});
      m.time_change_dimension = (d + 1 - 2.0 * lambda) / 2.0;
      break;
    case BesselRepresentation::RescaledSkeleton:
      fill_power_map(m, {2.0 / (d * c * c), -2.0 * lambda, (d - 1 - 2.0 * lambda) / 2.0});
      m.time_change_dimension = (d + 1 - 2.0 * lambda) / 2.0;
      break;
    case BesselRepresentation::RawNatural:
      fill_power_map(m, {2.0 * std::sqrt(2.0 * g) / (d * c), 0.5 - lambda, (d - 1) / 2.0});
      m.time_change_dimension = (d + 1) / 2.0;
      break;
    case BesselRepresentation::RawSkeleton:
    case BesselRepresentation::RawSkeletonFromRescaled: {
      // Lamperti map f(y) = c|y|^{lambda+1}/(lambda+1) with Bessel clock 2/d.
      m.b = std::pow((lambda + 1.0) / c, 1.0 / (lambda + 1.0));
      m.c = 1.0 / (lambda + 1.0);
      m.clock = 2.0 / d;
      if (rep == BesselRepresentation::RawSkeleton) {
        m.delta = (d + 1 + 4.0 * lambda) / (2.0 * (1.0 + lambda));
        m.time_change_dimension = (d + 1 + 2.0 * lambda) / 2.0;
      } else {
        m.delta = (d + 1 + 2.0 * lambda) / (2.0 * (1.0 + lambda));
        m.time_change_dimension = (d + 1 - 2.0 * lambda) / 2.0;
      }
      break;
    }
  }
  m.sampleable = m.delta > 0.0;
  return m;
}

BesselMap bessel_map(double lambda, int d, ScalingRegime::Mode mode) {
  return bessel_map(mode == ScalingRegime::Mode::RescaledDynamics ? BesselRepresentation::RescaledNatural
                                                                  : BesselRepresentation::RawSkeleton,
                    lambda, d);
}

GeneratorSpec mapped_bessel_generator(const BesselMap& map) {
  const double b = map.b, c = map.c, k = map.clock, delta = map.delta;
  GeneratorSpec out;
  out.a = [=](double y) { return 0.5 * k * b * b * c * c * std::pow(std::abs(y) / b, 2.0 - 2.0 / c); };
  out.b = [=](double y) {
    const double a = 0.5 * k * b * b * c * c * std::pow(std::abs(y) / b, 2.0 - 2.0 / c);
    return -a * (c + delta - 2.0) / (c * std::abs(y));
  };
  out.label = "mapped-bessel";
  return out;
}

double bessel_step(double delta, double x, double dt, Rng& rng, BesselBoundary boundary) {
  if (!(delta > 0.0)) throw std::invalid_argument("bessel: delta must be > 0");
  if (!(x >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("bessel: need x >= 0 and dt > 0");
  const double mu = x * x / (2.0 * dt);
  if (delta < 2.0 && boundary == BesselBoundary::Absorbing && x > 0.0 && mu < 40.0) {
    // Killed transition: with weight e^{-mu} mu^{k+nu}/Gamma(k+nu+1) the square is Gamma(k+1) * 2dt;
    // the missing mass is the probability of reaching 0. For mu >= 40 it is below 1e-17.
    const double nu = 1.0 - 0.5 * delta;
    const double u = rng.uniform();
    double w = std::exp(-mu + nu * std::log(mu) - std::lgamma(nu + 1.0));
    double cum = 0.0;
    for (int k = 0; k < 100000; ++k) {
      cum += w;
      if (u <= cum) return std::sqrt(2.0 * dt * rng.gamma(k + 1.0));
      if (k > mu && w < 1e-18) break;
      w *= mu / (k + 1.0 + nu);
    }
    return 0.0;
  }
  const long n = rng.poisson(mu);
  return std::sqrt(2.0 * dt * rng.gamma(0.5 * delta + static_cast<double>(n)));
}

std::vector<double> sample_bessel_path(double delta, double x0, const std::vector<double>& times, Rng& rng,
                                       BesselBoundary boundary) {
  if (!(delta > 0.0)) throw std::invalid_argument("bessel: delta must be > 0 (non-sampleable representation)");
  if (!(x0 >= 0.0)) throw std::invalid_argument("bessel: x0 must be >= 0");
  std::vector<double> out;
  out.reserve(times.size());
  double x = x0, t = 0.0;
  bool absorbed = false;
  for (double ti : times) {
    if (ti < t) throw std::invalid_argument("bessel: times must be nondecreasing");
    if (ti > t && !absorbed) {
      x = bessel_step(delta, x, ti - t, rng, boundary);
      if (x == 0.0 && delta < 2.0 && boundary == BesselBoundary::Absorbing) absorbed = true;
    }
    t = ti;
    out.push_back(absorbed ? 0.0 : x);
  }
  return out;
}

StoppedBessel sample_bessel_stopped(double delta, double x0, double level, double horizon, int steps, Rng& rng) {
  if (!(level > 0.0) || !(x0 > level)) throw std::invalid_argument("stopped bessel: need x0 > level > 0");
  if (steps < 1 || !(horizon > 0.0)) throw std::invalid_argument("stopped bessel: need steps >= 1, horizon > 0");
  const double dt = horizon / steps;
  double x = x0;
  for (int i = 0; i < steps; ++i) {
    const double next = bessel_step(delta, x, dt, rng);
    const double t = (i + 1) * dt;
    if (next <= level) return {level, true, t};
    // Unit diffusion coefficient: bridge crossing probability exp(-2 (x-l)(x'-l)/dt).
    if (rng.uniform() < std::exp(-2.0 * (x - level) * (next - level) / dt)) return {level, true, t};
    x = next;
  }
  return {x, false, horizon};
}

EulerPath euler_maruyama(const GeneratorSpec& gen, double y0, double dt, double horizon, double v, Rng& rng,
                         bool keep_path) {
  if (!(y0 < v && v < 0.0)) throw std::invalid_argument("euler: need y0 < v < 0");
  if (!(dt > 0.0) || !(horizon >= 0.0)) throw std::invalid_argument("euler: need dt > 0, horizon >= 0");
  EulerPath out;
  double t = 0.0, y = y0;
  if (keep_path) {
    out.t.push_back(t);
    out.y.push_back(y);
  }
  while (t < horizon) {
    double h = std::min(dt, horizon - t);
    const double a = gen.a(y);
    const double b = gen.b(y);
    while (std::abs(b) * h >= 0.1 * std::abs(y)) {
      h *= 0.5;
      if (h < dt * 0x1p-60) throw std::runtime_error("euler: step underflow");
    }
    const double s = std::sqrt(2.0 * a * h);
    const double next = y + b * h + s * rng.normal();
    t += h;
    if (!(std::abs(next) >= 1e-9 && std::abs(next) <= 1e9) && next < v) {
      throw std::runtime_error("euler: path left [1e-9, 1e9]");
    }
    // Absorb on landing above v, or on a bridge crossing between two points below v.
    bool hit = next >= v;
    if (!hit && s > 0.0) hit = rng.uniform() < std::exp(-2.0 * (v - y) * (v - next) / (s * s));
    if (hit) {
      y = v;
      out.absorbed = true;
      if (keep_path) {
        out.t.push_back(t);
        out.y.push_back(y);
      }
      break;
    }
    y = next;
    if (keep_path) {
      out.t.push_back(t);
      out.y.push_back(y);
    }
  }
  if (!keep_path) {
    out.t.push_back(t);
    out.y.push_back(y);
  }
  return out;
}

}  // namespace lgrav
