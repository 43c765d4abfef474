#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "lgrav/regime.hpp"
#include "lgrav/rng.hpp"
#include "lgrav/scattering.hpp"

namespace lgrav {

struct SkeletonRecord {
  long m = 0;
  double y = 0.0;      // depth at collision m
  double dt = 0.0;     // duration of flight m
  double clock = 0.0;  // T_m
  double ud = 0.0;     // vertical component of the direction of flight m (NaN at m = 0)
};

// Levels are in scaled units of the regime (multiplied by space_scale before use).
// With a lower level, the upper stop is armed only after the first collision below it.
struct StoppingSpec {
  long max_events = 1000;
  double max_clock = std::numeric_limits<double>::infinity();
  std::optional<double> upper;  // v: stop at the first collision with Y >= v
  std::optional<double> lower;  // z: window start
};

struct SkeletonRun {
  std::vector<SkeletonRecord> records;
  long window_start = 0;  // index of the first collision below z (0 without z)
  bool hit_upper = false;
  long stop_index() const { return records.back().m; }
};

std::vector<double> sample_direction(int d, Rng& rng);
// Fills u (size d) in place with the same draws as sample_direction.
void sample_direction_into(std::vector<double>& u, Rng& rng);

// Steps the collision chain one event at a time without storing the path.
class SkeletonChain {
 public:
  // The chain draws from `rng`, which must outlive it.
  SkeletonChain(const ScatterLaw& law, double y_init, Rng& rng);
  const SkeletonRecord& current() const { return cur_; }
  const SkeletonRecord& step();
  const std::vector<double>& direction() const { return u_; }

 private:
  const ScatterLaw* law_;
  Rng* rng_;
  SkeletonRecord cur_;
  std::vector<double> u_;
  double clock_sum_ = 0.0;
  double clock_comp_ = 0.0;  // Neumaier compensation for the clock
};

SkeletonRun run_skeleton(const ScatterLaw& law, double y_init, const StoppingSpec& stop, Rng& rng);

// Depth of the continuous path at clock t (model units), by parabolic interpolation.
double full_path_eval(const std::vector<SkeletonRecord>& path, double gravity, double t);

// Continuous path sampled at every event plus `refine` interior points per flight.
struct PathSamples {
  std::vector<double> t;
  std::vector<double> y;
};
PathSamples sample_full_path(const std::vector<SkeletonRecord>& path, double gravity, int refine = 8);

// Piecewise-linear function through (s_i, f_i); repeated s encodes a jump.
// Beyond the last knot the function continues with slope `tail_slope`.
struct PiecewiseLinear {
  std::vector<double> s;
  std::vector<double> f;
  double tail_slope = 0.0;
  double operator()(double x) const;
};

// Stopped, rescaled clock n^{-3/4} T_{(ns) ^ tau} + (s - tau/n)^+ / (sqrt(2g|v|) h(v)) at knots s = m/n,
// where h and g are the unscaled profile and gravity of the law.
PiecewiseLinear clock_profile(const SkeletonRun& run, const ScatterLaw& law, double v);
// psi_v of the step path s -> Y_{[ns] ^ tau}; same knots and tail as clock_profile.
PiecewiseLinear psi_profile(const SkeletonRun& run, const ScatterLaw& law, double v);
// psi_v(f)(s) for a path sampled on a grid (left-point rule on each cell).
std::vector<double> psi_v(const std::vector<double>& s, const std::vector<double>& f,
                          const DensityProfile& h, double g, double v);

// Psi(f)(t) = inf{s : f(s) > t}; +inf when f never exceeds t.
double right_continuous_inverse(const PiecewiseLinear& f, double t);
std::vector<double> right_continuous_inverse(const PiecewiseLinear& f, const std::vector<double>& t);
// Inverse as a function (for strictly increasing continuous parts it is the exact inverse).
PiecewiseLinear inverse_function(const PiecewiseLinear& f);

// Phi_eps(f)_t = int_0^t 1(f <= -eps) / (c sqrt(2g) |f|^{lambda + 1/2}) ds by the trapezoid rule.
// For eps = 0 the integrand is taken as 0 where f = 0.
std::vector<double> occupation_clock(const std::vector<double>& s, const std::vector<double>& f, double eps,
                                     double lambda, double c, double g);

// One JSON object per record: {"m","Y","dt","T","u_d"}, preceded by "path" when path_id >= 0.
// With skip_initial the m = 0 record is omitted.
void write_jsonl(std::ostream& os, const std::vector<SkeletonRecord>& path, long path_id = -1,
                 bool skip_initial = false);

}  // namespace lgrav
