#include "lgrav/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "lgrav/parallel.hpp"
#include "lgrav/quadrature.hpp"

namespace lgrav {

namespace {

double norm(const std::vector<double>& b) {
  double s = 0.0;
  for (double x : b) s += x * x;
  return std::sqrt(s);
}

void check_impact(const std::vector<double>& b) {
  if (b.empty()) throw std::invalid_argument("reflect: impact vector must have d-1 >= 1 entries");
  if (!(norm(b) < 1.0)) throw std::invalid_argument("reflect: need |b| < 1");
}

void check_beta(double beta, int d) {
  if (d < 2) throw std::invalid_argument("reflection: d must be >= 2");
  if (!(beta >= 0.0 && beta <= std::numbers::pi)) throw std::invalid_argument("reflection: beta must be in [0, pi]");
}

constexpr long kBlock = 1000;

}  // namespace

double reflect(const std::vector<double>& b) {
  check_impact(b);
  return 2.0 * std::asin(norm(b));
}

std::vector<double> reflect_direction(const std::vector<double>& b) {
  check_impact(b);
  const double r = norm(b);
  std::vector<double> n(b.size() + 1);
  n[0] = std::sqrt((1.0 - r) * (1.0 + r));
  std::copy(b.begin(), b.end(), n.begin() + 1);
  // w = -e_1; v = w - 2 (w.n) n = -e_1 + 2 n_1 n.
  std::vector<double> v(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) v[i] = 2.0 * n[0] * n[i];
  v[0] -= 1.0;
  return v;
}

double reflect_householder(const std::vector<double>& b) {
  const std::vector<double> v = reflect_direction(b);
  double perp = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) perp += v[i] * v[i];
  return std::atan2(std::sqrt(perp), v[0]);
}

double theta_cdf(double beta, int d) {
  check_beta(beta, d);
  return std::pow(std::sin(beta / 2.0), d - 1);
}

double cap_measure(double beta, int d) {
  check_beta(beta, d);
  if (d == 2) return beta / std::numbers::pi;
  if (d == 3) return 0.5 * (1.0 - std::cos(beta));
  const double k = std::exp(std::lgamma(d / 2.0) - std::lgamma((d - 1) / 2.0)) / std::sqrt(std::numbers::pi);
  auto w = [d](double g) { return std::pow(std::sin(g), d - 2); };
  return std::min(1.0, k * integrate(w, 0.0, beta, {1e-300, 1e-14, 4000}).value);
}

double density_ratio_witness(int d) {
  if (d < 2) throw std::invalid_argument("reflection: d must be >= 2");
  const double pi = std::numbers::pi;
  auto f = [d](double t) { return 0.5 * (d - 1) * std::pow(std::sin(t / 2.0), d - 2) * std::cos(t / 2.0); };
  auto g = [d](double t) { return std::pow(std::sin(t), d - 2); };
  return f(pi / 2) * g(pi / 4) / (g(pi / 2) * f(pi / 4));
}

std::vector<double> sample_impact(int d, Rng& rng) {
  if (d < 2) throw std::invalid_argument("reflection: d must be >= 2");
  std::vector<double> b(static_cast<std::size_t>(d - 1));
  for (;;) {
    double s = 0.0;
    for (double& x : b) {
      x = rng.normal();
      s += x * x;
    }
    if (s > 0.0) {
      const double r = std::pow(rng.uniform(), 1.0 / (d - 1)) / std::sqrt(s);
      for (double& x : b) x *= r;
      return b;
    }
  }
}

UniformityReport uniformity_experiment(int d, long samples, std::uint64_t seed, int threads, double alpha) {
  if (d < 2) throw std::invalid_argument("reflection: d must be >= 2");
  if (samples < 10000) throw std::invalid_argument("reflection: need at least 10^4 samples");
  UniformityReport out;
  out.d = d;
  out.samples = samples;
  out.theta.resize(static_cast<std::size_t>(samples));
  std::vector<double> radius(out.theta.size());
  const std::size_t blocks = static_cast<std::size_t>((samples + kBlock - 1) / kBlock);
  std::vector<double> gap(blocks, 0.0);
  parallel_for(blocks, threads, [&](std::size_t k) {
    Rng rng = Rng::substream(seed, k);
    const std::size_t lo = k * kBlock;
    const std::size_t hi = std::min(out.theta.size(), lo + kBlock);
    for (std::size_t i = lo; i < hi; ++i) {
      const std::vector<double> b = sample_impact(d, rng);
      out.theta[i] = reflect(b);
      radius[i] = norm(b);
      gap[k] = std::max(gap[k], std::abs(out.theta[i] - reflect_householder(b)));
    }
  });
  out.max_householder_gap = *std::max_element(gap.begin(), gap.end());
  out.vs_theta = ks_one_sample(out.theta, [d](double t) { return theta_cdf(t, d); }, alpha);
  out.vs_cap = ks_one_sample(out.theta, [d](double t) { return cap_measure(t, d); }, alpha);
  out.radius = ks_one_sample(radius, [d](double r) { return std::pow(std::clamp(r, 0.0, 1.0), d - 1); }, alpha);
  out.witness = density_ratio_witness(d);
  std::sort(out.theta.begin(), out.theta.end());
  return out;
}

void write_reflection_csv(std::ostream& os, const UniformityReport& report, int points) {
  if (points < 2) throw std::invalid_argument("reflection csv: need at least 2 points");
  os << "beta,empirical_cdf,theta_cdf,cap_measure\n";
  char buf[256];
  const double n = static_cast<double>(report.theta.size());
  for (int i = 0; i < points; ++i) {
    const double beta = std::numbers::pi * i / (points - 1);
    const auto it = std::upper_bound(report.theta.begin(), report.theta.end(), beta);
    const double emp = static_cast<double>(it - report.theta.begin()) / n;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", beta, emp, theta_cdf(beta, report.d),
                  cap_measure(beta, report.d));
    os << buf;
  }
}

}  // namespace lgrav
