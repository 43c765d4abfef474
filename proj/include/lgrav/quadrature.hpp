#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace lgrav {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

struct QuadTolerance {
  double abs = 1e-14;
  double rel = 1e-12;
  int max_panels = 4000;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

// Globally adaptive 7/15 Gauss-Kronrod on [a, b]; bisects the worst panel.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadTolerance& tol = {}) {
  if (a == b) return {};
  if (!(std::isfinite(a) && std::isfinite(b))) {
    throw std::invalid_argument("integrate: limits must be finite");
  }
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  detail::Panel first = detail::gk15(f, a, b);
  auto target = [&](double v) { return std::max(tol.abs, tol.rel * std::abs(v)); };
  if (first.error <= target(first.value)) return {sign * first.value, first.error, true};

  std::priority_queue<detail::Panel> heap;
  heap.push(first);
  double total = first.value;
  double err = first.error;
  int panels = 1;
  while (err > target(total) && panels < tol.max_panels) {
    detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      heap.push(worst);
      break;
    }
    detail::Panel l = detail::gk15(f, worst.a, mid);
    detail::Panel r = detail::gk15(f, mid, worst.b);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    ++panels;
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  double value = 0.0, error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {sign * value, error, error <= target(value)};
}

// Integrates over consecutive intervals of `points` (sorted, at least two).
template <class F>
QuadResult integrate_pieces(F&& f, const std::vector<double>& points, const QuadTolerance& tol = {}) {
  QuadResult out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    QuadResult r = integrate(f, points[i], points[i + 1], tol);
    out.value += r.value;
    out.error += r.error;
    out.converged = out.converged && r.converged;
  }
  return out;
}

}  // namespace lgrav
