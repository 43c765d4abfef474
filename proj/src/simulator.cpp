#include "lgrav/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace lgrav {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double profile_lambda(const DensityProfile& h) { return h.is_power_law() ? h.lambda() : 0.0; }

// Neumaier summation step.
void neumaier_add(double& sum, double& comp, double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x)) {
    comp += (sum - t) + x;
  } else {
    comp += (x - t) + sum;
  }
  sum = t;
}

double clock_weight(const DensityProfile& h, double g, double y) {
  return 1.0 / (std::sqrt(2.0 * g * std::abs(y)) * h.eval(y));
}

}  // namespace

std::vector<double> sample_direction(int d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("sample_direction: d must be >= 1");
  std::vector<double> u(static_cast<std::size_t>(d));
  sample_direction_into(u, rng);
  return u;
}

void sample_direction_into(std::vector<double>& u, Rng& rng) {
  if (u.empty()) throw std::invalid_argument("sample_direction: d must be >= 1");
  if (u.size() == 1) {
    u[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return;
  }
  for (;;) {
    double n2 = 0.0;
    for (double& x : u) {
      x = rng.normal();
      n2 += x * x;
    }
    if (n2 > 0.0) {
      const double inv = 1.0 / std::sqrt(n2);
      for (double& x : u) x *= inv;
      return;
    }
  }
}

SkeletonChain::SkeletonChain(const ScatterLaw& law, double y_init, Rng& rng)
    : law_(&law), rng_(&rng), u_(static_cast<std::size_t>(law.dimension()), 0.0) {
  if (!(y_init <= 0.0)) throw std::invalid_argument("skeleton: y_init must be <= 0");
  cur_ = SkeletonRecord{0, y_init, 0.0, 0.0, kNaN};
}

const SkeletonRecord& SkeletonChain::step() {
  if (cur_.y == 0.0) {
    // At rest at the surface: the only possible flight is straight down.
    std::fill(u_.begin(), u_.end(), 0.0);
    u_.back() = -1.0;
  } else {
    sample_direction_into(u_, *rng_);
  }
  const VerticalMotion m = law_->motion(cur_.y, u_.back());
  const double n = law_->invert(m, rng_->exponential());
  neumaier_add(clock_sum_, clock_comp_, n);
  cur_ = SkeletonRecord{cur_.m + 1, m.depth(n), n, clock_sum_ + clock_comp_, u_.back()};
  return cur_;
}

SkeletonRun run_skeleton(const ScatterLaw& law, double y_init, const StoppingSpec& stop, Rng& rng) {
  if (stop.max_events < 0) throw std::invalid_argument("skeleton: max_events must be >= 0");
  if (stop.upper && stop.lower && !(*stop.lower < *stop.upper)) {
    throw std::invalid_argument("skeleton: stopping levels need z < v");
  }
  if (stop.upper && !(*stop.upper < 0.0)) throw std::invalid_argument("skeleton: upper level must be < 0");
  const double scale = law.regime().space_scale(profile_lambda(law.profile()));
  const double v = stop.upper ? *stop.upper * scale : kInf;
  const double z = stop.lower ? *stop.lower * scale : kInf;
  bool armed = !stop.lower.has_value();

  SkeletonRun run;
  SkeletonChain chain(law, y_init, rng);
  run.records.push_back(chain.current());
  if (armed && y_init >= v) {
    run.hit_upper = true;
    return run;
  }
  while (chain.current().m < stop.max_events && chain.current().clock < stop.max_clock) {
    const SkeletonRecord& r = chain.step();
    run.records.push_back(r);
    if (!armed && r.y < z) {
      armed = true;
      run.window_start = r.m;
      continue;
    }
    if (armed && r.y >= v) {
      run.hit_upper = true;
      break;
    }
  }
  return run;
}

double full_path_eval(const std::vector<SkeletonRecord>& path, double gravity, double t) {
  if (path.empty()) throw std::invalid_argument("full_path_eval: empty path");
  if (!(t >= path.front().clock && t <= path.back().clock)) {
    throw std::out_of_range("full_path_eval: t outside the recorded clock range");
  }
  if (t == path.back().clock) return path.back().y;
  auto it = std::upper_bound(path.begin(), path.end(), t,
                             [](double x, const SkeletonRecord& r) { return x < r.clock; });
  const SkeletonRecord& end = *it;
  const SkeletonRecord& start = *(it - 1);
  return VerticalMotion(start.y, end.ud, gravity).depth(t - start.clock);
}

PathSamples sample_full_path(const std::vector<SkeletonRecord>& path, double gravity, int refine) {
  if (refine < 0) throw std::invalid_argument("sample_full_path: refine must be >= 0");
  PathSamples out;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const VerticalMotion m(path[i - 1].y, path[i].ud, gravity);
    for (int k = 0; k <= refine; ++k) {
      const double dt = path[i].dt * k / (refine + 1);
      out.t.push_back(path[i - 1].clock + dt);
      out.y.push_back(m.depth(dt));
    }
  }
  out.t.push_back(path.back().clock);
  out.y.push_back(path.back().y);
  return out;
}

double PiecewiseLinear::operator()(double x) const {
  if (s.empty()) throw std::invalid_argument("piecewise linear: no knots");
  if (x < s.front()) return f.front();
  if (x >= s.back()) return f.back() + tail_slope * (x - s.back());
  // Right-continuous at jumps: take the last knot with s_i <= x.
  const std::size_t j = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), x) - s.begin());
  const std::size_t i = j - 1;
  if (s[j] == s[i]) return f[i];
  return f[i] + (f[j] - f[i]) * (x - s[i]) / (s[j] - s[i]);
}

PiecewiseLinear clock_profile(const SkeletonRun& run, const ScatterLaw& law, double v) {
  const double lambda = profile_lambda(law.profile());
  const double n = law.regime().skeleton_scale();
  const double cs = law.regime().clock_scale(lambda);
  PiecewiseLinear out;
  for (const SkeletonRecord& r : run.records) {
    out.s.push_back(static_cast<double>(r.m) / n);
    out.f.push_back(r.clock / cs);
  }
  out.tail_slope = clock_weight(law.profile(), law.gravity(), v);
  return out;
}

PiecewiseLinear psi_profile(const SkeletonRun& run, const ScatterLaw& law, double v) {
  const double n = law.regime().skeleton_scale();
  PiecewiseLinear out;
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    out.s.push_back(static_cast<double>(run.records[i].m) / n);
    out.f.push_back(sum + comp);
    const double y = std::min(run.records[i].y, v);
    neumaier_add(sum, comp, clock_weight(law.profile(), law.gravity(), y) / n);
  }
  out.tail_slope = clock_weight(law.profile(), law.gravity(), v);
  return out;
}

std::vector<double> psi_v(const std::vector<double>& s, const std::vector<double>& f, const DensityProfile& h,
                          double g, double v) {
  if (s.size() != f.size() || s.empty()) throw std::invalid_argument("psi_v: grid and path sizes differ");
  std::vector<double> out(s.size(), 0.0);
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    neumaier_add(sum, comp, clock_weight(h, g, std::min(f[i - 1], v)) * (s[i] - s[i - 1]));
    out[i] = sum + comp;
  }
  return out;
}

double right_continuous_inverse(const PiecewiseLinear& f, double t) {
  if (f.s.empty()) throw std::invalid_argument("inverse: no knots");
  const std::size_t j = static_cast<std::size_t>(std::upper_bound(f.f.begin(), f.f.end(), t) - f.f.begin());
  if (j == 0) return f.s.front();
  if (j == f.f.size()) {
    if (f.tail_slope > 0.0) return f.s.back() + (t - f.f.back()) / f.tail_slope;
    return kInf;
  }
  const std::size_t i = j - 1;
  if (f.s[j] == f.s[i]) return f.s[i];
  return f.s[i] + (t - f.f[i]) * (f.s[j] - f.s[i]) / (f.f[j] - f.f[i]);
}

std::vector<double> right_continuous_inverse(const PiecewiseLinear& f, const std::vector<double>& t) {
  std::vector<double> out;
  out.reserve(t.size());
  for (double x : t) out.push_back(right_continuous_inverse(f, x));
  return out;
}

PiecewiseLinear inverse_function(const PiecewiseLinear& f) {
  PiecewiseLinear g;
  g.s = f.f;
  g.f = f.s;
  g.tail_slope = f.tail_slope > 0.0 ? 1.0 / f.tail_slope : 0.0;
  return g;
}

std::vector<double> occupation_clock(const std::vector<double>& s, const std::vector<double>& f, double eps,
                                     double lambda, double c, double g) {
  if (s.size() != f.size() || s.empty()) throw std::invalid_argument("occupation_clock: grid and path sizes differ");
  if (!(eps >= 0.0)) throw std::invalid_argument("occupation_clock: eps must be >= 0");
  const double k = c * std::sqrt(2.0 * g);
  auto w = [&](double y) { return (y <= -eps && y < 0.0) ? 1.0 / (k * std::pow(-y, lambda + 0.5)) : 0.0; };
  std::vector<double> out(s.size(), 0.0);
  double prev = w(f[0]);
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double cur = w(f[i]);
    neumaier_add(sum, comp, 0.5 * (prev + cur) * (s[i] - s[i - 1]));
    out[i] = sum + comp;
    prev = cur;
  }
  return out;
}

void write_jsonl(std::ostream& os, const std::vector<SkeletonRecord>& path, long path_id, bool skip_initial) {
  char buf[320];
  char ud[32];
  char id[32] = "";
  if (path_id >= 0) std::snprintf(id, sizeof id, "\"path\":%ld,", path_id);
  for (const SkeletonRecord& r : path) {
    if (skip_initial && r.m == 0) continue;
    if (std::isnan(r.ud)) {
      std::snprintf(ud, sizeof ud, "null");
    } else {
      std::snprintf(ud, sizeof ud, "%.17g", r.ud);
    }
    std::snprintf(buf, sizeof buf, "{%s\"m\":%ld,\"Y\":%.17g,\"dt\":%.17g,\"T\":%.17g,\"u_d\":%s}\n", id, r.m, r.y,
                  r.dt, r.clock, ud);
    os << buf;
  }
}

}  // namespace lgrav
