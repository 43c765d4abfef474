#include "lgrav/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "lgrav/parallel.hpp"
#include "lgrav/quadrature.hpp"
#include "lgrav/simulator.hpp"

namespace lgrav {

void MomentAccumulator::add(double x) {
  const double n1 = static_cast<double>(n_);
  ++n_;
  const double n = static_cast<double>(n_);
  const double delta = x - mean_;
  const double dn = delta / n;
  const double dn2 = dn * dn;
  const double term1 = delta * dn * n1;
  mean_ += dn;
  m4_ += term1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2_ - 4.0 * dn * m3_;
  m3_ += term1 * dn * (n - 2.0) - 3.0 * dn * m2_;
  m2_ += term1;
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double d = o.mean_ - mean_;
  const double d2 = d * d, d3 = d2 * d, d4 = d2 * d2;
  const double mean = mean_ + d * nb / n;
  const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
  const double m3 = m3_ + o.m3_ + d3 * na * nb * (na - nb) / (n * n) + 3.0 * d * (na * o.m2_ - nb * m2_) / n;
  const double m4 = m4_ + o.m4_ + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                    6.0 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) + 4.0 * d * (na * o.m3_ - nb * m3_) / n;
  n_ += o.n_;
  mean_ = mean;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
}

double MomentAccumulator::variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

double MomentAccumulator::std_error() const {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double MomentAccumulator::central_moment(int k) const {
  if (n_ == 0) return 0.0;
  const double n = static_cast<double>(n_);
  switch (k) {
    case 2: return m2_ / n;
    case 3: return m3_ / n;
    case 4: return m4_ / n;
    default: throw std::invalid_argument("central_moment: k must be 2, 3 or 4");
  }
}

double kolmogorov_sf(double x) {
  if (!(x > 0.0)) return 1.0;
  if (x < 1.18) {
    // Jacobi-theta form of the CDF, fast for small x.
    const double pi = std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double term = std::exp(-(2.0 * k - 1.0) * (2.0 * k - 1.0) * pi * pi / (8.0 * x * x));
      cdf += term;
      if (term < 1e-300) break;
    }
    return 1.0 - std::sqrt(2.0 * pi) / x * cdf;
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double kolmogorov_critical(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("kolmogorov_critical: alpha in (0, 1)");
  double lo = 0.05, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_sf(mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

KsResult finish_ks(double stat, double n_eff, double alpha) {
  KsResult r;
  r.statistic = stat;
  r.n_eff = n_eff;
  r.critical = kolmogorov_critical(alpha) / std::sqrt(n_eff);
  r.p_value = kolmogorov_sf(stat * std::sqrt(n_eff));
  r.pass = stat <= r.critical;
  return r;
}

}  // namespace

KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf, double alpha) {
  if (x.size() < 100) throw std::invalid_argument("ks_one_sample: need at least 100 samples");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < x.size()) {
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) ++j;
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(j) / n - f});
    i = j;
  }
  return finish_ks(d, n, alpha);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha) {
  if (a.size() < 100 || b.size() < 100) throw std::invalid_argument("ks_two_sample: need at least 100 samples each");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return finish_ks(d, na * nb / (na + nb), alpha);
}

double LadderRung::error() const { return std::abs(statistic - target); }

LadderReport evaluate_ladder(std::string name, std::vector<LadderRung> rungs, double tolerance) {
  if (rungs.empty()) throw std::invalid_argument("ladder: no rungs");
  for (std::size_t k = 1; k < rungs.size(); ++k) {
    if (!(rungs[k].parameter > rungs[k - 1].parameter)) throw std::invalid_argument("ladder: rungs must increase");
  }
  LadderReport r;
  r.name = std::move(name);
  r.rungs = std::move(rungs);
  r.tolerance = tolerance;
  r.monotone = true;
  for (std::size_t k = 1; k < r.rungs.size(); ++k) {
    const LadderRung& a = r.rungs[k - 1];
    const LadderRung& b = r.rungs[k];
    const double slack = 3.0 * std::hypot(a.se, b.se);
    const bool ok = slack > 0.0 ? b.error() <= a.error() + slack : (b.error() < a.error() || b.error() == 0.0);
    r.monotone = r.monotone && ok;
  }
  const LadderRung& top = r.rungs.back();
  r.within = top.error() <= std::max(3.0 * top.se, tolerance);
  r.pass = r.monotone && r.within;
  return r;
}

void write_ladder_csv(std::ostream& os, const std::vector<LadderReport>& reports, bool header) {
  if (header) os << "name,rung,parameter,statistic,target,se,error,pass\n";
  char buf[512];
  for (const LadderReport& r : reports) {
    for (std::size_t k = 0; k < r.rungs.size(); ++k) {
      const LadderRung& g = r.rungs[k];
      std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", r.name.c_str(), k, g.parameter,
                    g.statistic, g.target, g.se, g.error(), r.pass ? "true" : "false");
      os << buf;
    }
  }
}

OneStepTargets stated_one_step_targets(int d, double lambda) {
  const double m = (d + 2.0 * lambda - 1.0) / (2.0 * d);
  return {m, 2.0 / d, m / (1.0 + lambda), 2.0 / d};
}

OneStepTargets model_one_step_targets(int d, double lambda) {
  return {(d - 1.0 - 2.0 * lambda) / (2.0 * d), 2.0 / d, (d - 1.0) / (2.0 * d * (1.0 + lambda)), 2.0 / d};
}

std::pair<double, double> one_step_exact(const ScatterLaw& law, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("one_step_exact: x must be > 0");
  const int d = law.dimension();
  const double g = law.effective_gravity();
  const double v = std::sqrt(2.0 * g * x);
  auto m1 = [&](double u) { return 0.5 * g * moment_oracle(law, -x, u, 2) - u * v * moment_oracle(law, -x, u, 1); };
  auto m2 = [&](double u) {
    return 2.0 * g * x * u * u * moment_oracle(law, -x, u, 2) - g * u * v * moment_oracle(law, -x, u, 3) +
           0.25 * g * g * moment_oracle(law, -x, u, 4);
  };
  double mu1, mu2;
  if (d == 1) {
    mu1 = 0.5 * (m1(1.0) + m1(-1.0));
    mu2 = 0.5 * (m2(1.0) + m2(-1.0));
  } else {
    // u_d = sin(theta) has density proportional to cos(theta)^{d-2} on [-pi/2, pi/2].
    const double half = std::numbers::pi / 2.0;
    const QuadTolerance tol{1e-300, 1e-10, 4000};
    auto w = [d](double th) { return std::pow(std::cos(th), d - 2); };
    const double z = integrate(w, -half, half, tol).value;
    mu1 = integrate([&](double th) { return w(th) * m1(std::sin(th)); }, -half, half, tol).value / z;
    mu2 = integrate([&](double th) { return w(th) * m2(std::sin(th)); }, -half, half, tol).value / z;
  }
  const double h = law.effective_profile().eval(-x);
  return {x * h * h * mu1, h * h * mu2};
}

namespace {

constexpr long kBlock = 1000;

struct OneStepBlock {
  MomentAccumulator plain1, plain2, paired, lamperti1, lamperti2;
};

}  // namespace

std::vector<OneStepRung> one_step_moment_scan(const ScatterLaw& law, const std::vector<double>& xs, long samples,
                                              std::uint64_t seed, int threads, bool exact) {
  if (!law.effective_profile().is_power_law()) throw std::invalid_argument("one_step_moment_scan: power law only");
  if (samples < 1) throw std::invalid_argument("one_step_moment_scan: samples must be >= 1");
  const double c = law.effective_profile().amplitude();
  const double lambda = law.effective_profile().lambda();
  auto lamperti = [c, lambda](double y) { return c * std::pow(std::abs(y), lambda + 1.0) / (lambda + 1.0); };
  std::vector<OneStepRung> out;
  for (std::size_t r = 0; r < xs.size(); ++r) {
    const double x = xs[r];
    if (!(x > 0.0)) throw std::invalid_argument("one_step_moment_scan: x must be > 0");
    const double xf = lamperti(-x);
    const std::size_t blocks = static_cast<std::size_t>((samples + kBlock - 1) / kBlock);
    std::vector<OneStepBlock> acc(blocks);
    parallel_for(blocks, threads, [&](std::size_t b) {
      Rng rng = Rng::substream(seed, (static_cast<std::uint64_t>(r) << 32) | b);
      std::vector<double> u(static_cast<std::size_t>(law.dimension()));
      const long count = std::min<long>(kBlock, samples - static_cast<long>(b) * kBlock);
      OneStepBlock& a = acc[b];
      for (long i = 0; i < count; ++i) {
        sample_direction_into(u, rng);
        const double ud = u.back();
        const double e = rng.exponential();
        const VerticalMotion mp = law.motion(-x, ud);
        const VerticalMotion mm = law.motion(-x, -ud);
        const double yp = mp.depth(law.invert(mp, e));
        const double ym = mm.depth(law.invert(mm, e));
        const double dp = -yp - x, dm = -ym - x;
        a.plain1.add(dp);
        a.plain2.add(dp * dp);
        a.paired.add(0.5 * (dp + dm));
        const double lp = lamperti(yp) - xf, lm = lamperti(ym) - xf;
        a.lamperti1.add(0.5 * (lp + lm));
        a.lamperti2.add(lp * lp);
      }
    });
    OneStepBlock total;
    for (const OneStepBlock& a : acc) {
      total.plain1.merge(a.plain1);
      total.plain2.merge(a.plain2);
      total.paired.merge(a.paired);
      total.lamperti1.merge(a.lamperti1);
      total.lamperti2.merge(a.lamperti2);
    }
    const double h = law.effective_profile().eval(-x);
    const double s1 = x * h * h, s2 = h * h;
    OneStepRung row;
    row.x = x;
    row.samples = samples;
    row.mean1 = s1 * total.plain1.mean();
    row.se1 = s1 * total.plain1.std_error();
    row.mean2 = s2 * total.plain2.mean();
    row.se2 = s2 * total.plain2.std_error();
    row.paired1 = s1 * total.paired.mean();
    row.paired_se1 = s1 * total.paired.std_error();
    row.lamperti1 = xf * total.lamperti1.mean();
    row.lamperti_se1 = xf * total.lamperti1.std_error();
    row.lamperti2 = total.lamperti2.mean();
    row.lamperti_se2 = total.lamperti2.std_error();
    if (exact) {
      std::tie(row.exact1, row.exact2) = one_step_exact(law, x);
    } else {
      row.exact1 = row.exact2 = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(row);
  }
  return out;
}

const RecurrenceRow& RecurrenceReport::at(std::size_t drop, std::size_t horizon) const {
  return rows.at(drop * horizons + horizon);
}

RecurrenceReport recurrence_scan(const ScatterLaw& law, const RecurrenceParams& p, std::uint64_t seed, int threads) {
  if (!(p.return_level < 0.0)) throw std::invalid_argument("recurrence_scan: return level must be < 0");
  if (p.drop_factors.empty()) throw std::invalid_argument("recurrence_scan: need at least one drop factor");
  for (double f : p.drop_factors) {
    if (!(f > 1.0)) throw std::invalid_argument("recurrence_scan: drop factors must be > 1");
  }
  if (p.horizons.empty()) throw std::invalid_argument("recurrence_scan: need at least one horizon");
  for (std::size_t i = 0; i < p.horizons.size(); ++i) {
    if (p.horizons[i] < 1 || (i > 0 && p.horizons[i] <= p.horizons[i - 1])) {
      throw std::invalid_argument("recurrence_scan: horizons must be positive and increasing");
    }
  }
  if (p.trials < 1) throw std::invalid_argument("recurrence_scan: trials must be >= 1");
  const std::size_t k = p.drop_factors.size();
  const double v = p.return_level;
  const long horizon = p.horizons.back();

  // Per trial and drop level: event index of the first drop and of the first return after it (-1 if none).
  std::vector<std::vector<long>> marks(static_cast<std::size_t>(p.trials), std::vector<long>(2 * k, -1));
  parallel_for(marks.size(), threads, [&](std::size_t t) {
    Rng rng = Rng::substream(seed, t);
    SkeletonChain chain(law, 0.0, rng);
    std::vector<long>& f = marks[t];
    for (long m = 1; m <= horizon; ++m) {
      const double y = chain.step().y;
      bool done = true;
      for (std::size_t j = 0; j < k; ++j) {
        if (f[2 * j] < 0 && y < p.drop_factors[j] * v) f[2 * j] = m;
        if (f[2 * j] >= 0 && f[2 * j + 1] < 0 && y >= v) f[2 * j + 1] = m;
        done = done && f[2 * j + 1] >= 0;
      }
      if (done) break;
    }
  });

  RecurrenceReport out;
  out.horizons = p.horizons.size();
  for (std::size_t j = 0; j < k; ++j) {
    for (long h : p.horizons) {
      RecurrenceRow row;
      row.drop_level = p.drop_factors[j] * v;
      row.horizon = h;
      row.trials = p.trials;
      for (const auto& f : marks) {
        if (f[2 * j] >= 0 && f[2 * j] <= h) ++row.dropped;
        if (f[2 * j + 1] >= 0 && f[2 * j + 1] <= h) ++row.returned;
      }
      if (row.dropped > 0) {
        row.fraction = static_cast<double>(row.returned) / static_cast<double>(row.dropped);
        row.se = std::sqrt(row.fraction * (1.0 - row.fraction) / static_cast<double>(row.dropped));
      }
      out.rows.push_back(row);
    }
  }

  const double lambda = law.effective_profile().is_power_law() ? law.effective_profile().lambda() : 0.0;
  out.growth_target = 1.0 / (2.0 * (1.0 + lambda));
  std::vector<long> checkpoints;
  for (long m = 1; m <= p.growth_events; m *= 2) checkpoints.push_back(m);
  if (p.growth_trials > 0 && checkpoints.size() >= 3) {
    std::vector<std::vector<double>> depth(static_cast<std::size_t>(p.growth_trials),
                                           std::vector<double>(checkpoints.size(), 0.0));
    parallel_for(depth.size(), threads, [&](std::size_t t) {
      Rng rng = Rng::substream(seed, (std::uint64_t{1} << 40) | t);
      SkeletonChain chain(law, 0.0, rng);
      std::size_t next = 0;
      for (long m = 1; next < checkpoints.size(); ++m) {
        const double y = chain.step().y;
        if (m == checkpoints[next]) depth[t][next++] = std::abs(y);
      }
    });
    // Least-squares slope over the last half of the dyadic checkpoints (at least three).
    const std::size_t first = std::min(checkpoints.size() - 3, checkpoints.size() / 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double cnt = 0;
    for (std::size_t i = first; i < checkpoints.size(); ++i) {
      double mean = 0.0;
      for (const auto& row : depth) mean += row[i];
      mean /= static_cast<double>(depth.size());
      const double lx = std::log(static_cast<double>(checkpoints[i])), ly = std::log(mean);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      cnt += 1.0;
    }
    out.growth_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  }
  return out;
}

InvarianceReport invariance_marginal_test(const DensityProfile& h, const FlightParams& params, BesselRepresentation rep,
                                          double t, const std::vector<double>& ns, long paths, std::uint64_t seed,
                                          int threads, double alpha) {
  if (!h.is_power_law()) throw std::invalid_argument("invariance: power-law profile required");
  if (!(t >= 0.0)) throw std::invalid_argument("invariance: t must be >= 0");
  if (paths < 100) throw std::invalid_argument("invariance: need at least 100 paths");
  const double lambda = h.lambda();
  InvarianceReport out;
  out.map = bessel_map(rep, lambda, params.d, h.amplitude(), params.g);
  if (!out.map.sampleable) throw std::invalid_argument("invariance: representation has delta <= 0");
  const ScatterLaw law(h, params, ScalingRegime::raw());
  for (std::size_t r = 0; r < ns.size(); ++r) {
    const double n = ns[r];
    if (!(n >= 1.0) || (r > 0 && !(n > ns[r - 1]))) throw std::invalid_argument("invariance: n ladder must increase");
    const long steps = static_cast<long>(std::floor(n * t));
    const double scale = std::pow(n, 1.0 / (2.0 + 2.0 * lambda));
    const double tau = out.map.clock * t;
    std::vector<double> sample(static_cast<std::size_t>(paths)), reference(static_cast<std::size_t>(paths));
    const std::uint64_t key = static_cast<std::uint64_t>(r) << 32;
    parallel_for(sample.size(), threads, [&](std::size_t i) {
      Rng rng = Rng::substream(seed, key | i);
      SkeletonChain chain(law, 0.0, rng);
      for (long m = 0; m < steps; ++m) chain.step();
      sample[i] = chain.current().y / scale;
      Rng ref = Rng::substream(seed, (std::uint64_t{1} << 48) | key | i);
      const double x = tau > 0.0 ? bessel_step(out.map.delta, 0.0, tau, ref, BesselBoundary::Reflecting) : 0.0;
      reference[i] = out.map.depth(x);
    });
    InvarianceRung rung;
    rung.n = n;
    rung.steps = steps;
    rung.ks = ks_two_sample(sample, reference, alpha);
    out.rungs.push_back(rung);
    if (r + 1 == ns.size()) {
      out.top_sample = std::move(sample);
      out.top_reference = std::move(reference);
    }
  }
  out.decreasing = true;
  for (std::size_t r = 1; r < out.rungs.size(); ++r) {
    const double a = out.rungs[r - 1].ks.statistic, b = out.rungs[r].ks.statistic;
    out.decreasing = out.decreasing && (b < a || (a == 0.0 && b == 0.0));
  }
  out.pass = out.decreasing && !out.rungs.empty() && out.rungs.back().ks.pass;
  return out;
}

}  // namespace lgrav
