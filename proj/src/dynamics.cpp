#include "lgrav/dynamics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace lgrav {

VerticalMotion::VerticalMotion(double y0_, double ud_, double g_)
    : y0(y0_), ud(ud_), g(g_) {
  v0 = std::sqrt(2.0 * g * std::abs(y0));
  vz = v0 * ud;
  const double c2 = std::max(0.0, (1.0 - ud) * (1.0 + ud));
  lateral2 = 2.0 * g * std::abs(y0) * c2;
  apex = y0 * c2;
  apex_time = vz > 0.0 ? vz / g : 0.0;
}

ParabolicFlight make_flight(double y0, std::vector<double> u, FlightParams params) {
  if (!(params.g > 0.0) || !std::isfinite(params.g)) throw std::invalid_argument("flight: g must be > 0");
  if (params.d < 1) throw std::invalid_argument("flight: d must be >= 1");
  if (!(y0 <= 0.0)) throw std::invalid_argument("flight: y0 must be <= 0");
  if (static_cast<int>(u.size()) != params.d) {
    throw std::invalid_argument("flight: direction has " + std::to_string(u.size()) +
                                " components, expected d = " + std::to_string(params.d));
  }
  double norm2 = 0.0;
  for (double x : u) norm2 += x * x;
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) throw std::invalid_argument("flight: |u| != 1");
  return ParabolicFlight{y0, std::move(u), params};
}

ParabolicFlight make_flight_ud(double y0, double ud, FlightParams params) {
  if (!(ud >= -1.0 && ud <= 1.0)) throw std::invalid_argument("flight: u_d outside [-1, 1]");
  std::vector<double> u(static_cast<std::size_t>(std::max(params.d, 1)), 0.0);
  if (params.d == 1) {
    if (std::abs(ud) != 1.0) throw std::invalid_argument("flight: d = 1 requires u_d = +-1");
  } else {
    u[0] = std::sqrt(std::max(0.0, (1.0 - ud) * (1.0 + ud)));
  }
  u.back() = ud;
  return make_flight(y0, std::move(u), params);
}

ParabolicFlight ParabolicFlight::advance(double t) const {
  VerticalMotion m(y0, ud(), params.g);
  ParabolicFlight out{m.depth(t), u, params};
  const double speed = m.speed(t);
  const double wz = m.vz - params.g * t;
  if (speed > 0.0) {
    for (std::size_t i = 0; i + 1 < u.size(); ++i) out.u[i] = u[i] * m.v0 / speed;
    out.u.back() = wz / speed;
  } else {
    std::fill(out.u.begin(), out.u.end(), 0.0);
    out.u.back() = -1.0;
  }
  return out;
}

double flight_depth(const ParabolicFlight& f, double t) {
  return VerticalMotion(f.y0, f.ud(), f.params.g).depth(t);
}

double flight_speed(const ParabolicFlight& f, double t) {
  return VerticalMotion(f.y0, f.ud(), f.params.g).speed(t);
}

namespace {

// Phi(w) = int_0^w sqrt(a^2 + s^2) ds for w >= 0.
double phi(double a2, double w) {
  const double r = std::sqrt(a2 + w * w);
  const double a = std::sqrt(a2);
  return 0.5 * (w * r + (a > 0.0 ? a2 * std::asinh(w / a) : 0.0));
}

// int_p^q sqrt(a^2 + s^2) ds for 0 <= p <= q with width = q - p supplied exactly,
// written without subtractive cancellation.
double phi_diff(double a2, double p, double q, double width) {
  if (!(width > 0.0)) return 0.0;
  const double rp = std::sqrt(a2 + p * p);
  const double rq = std::sqrt(a2 + q * q);
  const double dq = width * (q + p);
  double out = dq * (a2 + q * q + p * p) / (q * rq + p * rp);
  if (a2 > 0.0) out += a2 * std::asinh(dq / (q * rp + p * rq));
  return 0.5 * out;
}

}  // namespace

double arc_length(const ParabolicFlight& f, double t) {
  if (t < 0.0) throw std::invalid_argument("arc_length: t must be >= 0");
  if (t == 0.0) return 0.0;
  VerticalMotion m(f.y0, f.ud(), f.params.g);
  const double hi = m.vz;
  const double lo = m.vz - m.g * t;
  double s;
  if (lo >= 0.0) {
    s = phi_diff(m.lateral2, lo, hi, m.g * t);
  } else if (hi <= 0.0) {
    s = phi_diff(m.lateral2, -hi, -lo, m.g * t);
  } else {
    s = phi(m.lateral2, hi) + phi(m.lateral2, -lo);
  }
  return s / m.g;
}

double unit_step_time(double y, double ud, const FlightParams& params) {
  if (!(y <= -1.0)) throw std::invalid_argument("unit_step_time: requires y <= -1");
  if (!(params.g > 0.0)) throw std::invalid_argument("unit_step_time: g must be > 0");
  const double ay = std::abs(y);
  const double k = std::sqrt(2.0 / params.g);
  double lo = k / (std::sqrt(ay + 1.0) + std::sqrt(ay));
  double hi = k / (std::sqrt(ay) + std::sqrt(ay - 1.0));
  if (ud == -1.0) return lo;
  if (ud == 1.0) return hi;

  const ParabolicFlight f = make_flight_ud(y, ud, FlightParams{params.g, std::max(params.d, 2)});
  VerticalMotion m(f.y0, ud, params.g);
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double r = arc_length(f, t) - 1.0;
    if (r == 0.0) return t;
    if (r > 0.0) hi = t; else lo = t;
    const double v = m.speed(t);
    double next = v > 0.0 ? t - r / v : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - t);
    t = next;
    if (step <= 1e-15 * t || hi - lo <= 1e-15 * t) return t;
  }
  if (hi - lo > 1e-12) throw std::runtime_error("unit_step_time: root bracketing failed");
  return t;
}

}  // namespace lgrav
