#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "lgrav/diffusion.hpp"
#include "lgrav/scattering.hpp"

namespace lgrav {

// Running count, mean and central moment sums up to order 4; merge is exact in exact arithmetic.
class MomentAccumulator {
 public:
  void add(double x);
  void merge(const MomentAccumulator& other);
  long count() const { return n_; }
  double mean() const { return mean_; }
  // Unbiased sample variance (0 for fewer than two values).
  double variance() const;
  double std_error() const;
  // Population central moment of order k in {2, 3, 4}.
  double central_moment(int k) const;

 private:
  long n_ = 0;
  double mean_ = 0.0, m2_ = 0.0, m3_ = 0.0, m4_ = 0.0;
};

// P(K > x) for the Kolmogorov distribution.
double kolmogorov_sf(double x);
// c with P(K > c) = alpha.
double kolmogorov_critical(double alpha);

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;  // c(alpha) / sqrt(n_eff)
  double p_value = 1.0;
  double n_eff = 0.0;
  bool pass = true;
};
// Samples are taken by value and sorted. Both require at least 100 samples per sample.
KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf, double alpha = 0.01);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha = 0.01);

struct LadderRung {
  double parameter = 0.0;
  double statistic = 0.0;
  double target = 0.0;
  double se = 0.0;
  double error() const;  // |statistic - target|
};

// Pass requires the top-rung error within max(3 se, tolerance) and errors that do not grow
// along the ladder beyond 3 combined standard errors (strictly decreasing when se = 0).
struct LadderReport {
  std::string name;
  std::vector<LadderRung> rungs;
  double tolerance = 0.0;
  bool monotone = false;
  bool within = false;
  bool pass = false;
};
LadderReport evaluate_ladder(std::string name, std::vector<LadderRung> rungs, double tolerance = 0.0);
// Columns: name,rung,parameter,statistic,target,se,error,pass (pass is the report's verdict).
void write_ladder_csv(std::ostream& os, const std::vector<LadderReport>& reports, bool header = true);

// One collision from Y_0 = -x in the raw power-law medium, h = c|y|^lambda.
struct OneStepRung {
  double x = 0.0;
  long samples = 0;
  // Plain sample means: x h^2 mu_1 and h^2 mu_2, with mu_k = E(|Y_1| - x)^k.
  double mean1 = 0.0, se1 = 0.0;
  double mean2 = 0.0, se2 = 0.0;
  // Same x h^2 mu_1 from pairs (u, -u) sharing one exponential clock; unbiased since u and -u
  // have the same law, with far smaller variance.
  double paired1 = 0.0, paired_se1 = 0.0;
  // Lamperti coordinate f(y) = c|y|^{lambda+1}/(lambda+1): f(-x) mu~_1 (paired) and mu~_2.
  double lamperti1 = 0.0, lamperti_se1 = 0.0;
  double lamperti2 = 0.0, lamperti_se2 = 0.0;
  // Quadrature over u_d of the exact flight-time moments; NaN when not requested.
  double exact1 = 0.0, exact2 = 0.0;
};

struct OneStepTargets {
  double mean;            // lim x h^2 mu_1
  double second;          // lim h^2 mu_2
  double lamperti_mean;   // lim x mu~_1
  double lamperti_second; // lim mu~_2
};
// Limits as stated for the power-law chain: (d+2 lambda-1)/(2d), 2/d, (d+2 lambda-1)/(2d(1+lambda)), 2/d.
OneStepTargets stated_one_step_targets(int d, double lambda);
// Limits implied by the exact flight-time law: (d-1-2 lambda)/(2d), 2/d, (d-1)/(2d(1+lambda)), 2/d.
OneStepTargets model_one_step_targets(int d, double lambda);

std::vector<OneStepRung> one_step_moment_scan(const ScatterLaw& law, const std::vector<double>& xs, long samples,
                                              std::uint64_t seed, int threads, bool exact = true);
// Exact x h^2 mu_1 and h^2 mu_2 by quadrature over the law of u_d.
std::pair<double, double> one_step_exact(const ScatterLaw& law, double x);

struct RecurrenceParams {
  double return_level = -1.0;              // v < 0
  std::vector<double> drop_factors{10.0};  // first-drop levels factor * v
  std::vector<long> horizons{100000};      // increasing event counts; the last one is simulated
  long trials = 1000;
  long growth_events = 4096;               // unstopped runs for the growth exponent
  long growth_trials = 200;
};
struct RecurrenceRow {
  double drop_level = 0.0;
  long horizon = 0;
  long trials = 0;
  long dropped = 0;   // trials that went below drop_level by the horizon
  long returned = 0;  // of those, trials that came back to Y >= v by the horizon
  double fraction = 0.0;
  double se = 0.0;
};
struct RecurrenceReport {
  std::vector<RecurrenceRow> rows;  // drop level major, horizon minor
  std::size_t horizons = 0;
  double growth_exponent = 0.0;     // slope of log E|Y_m| against log m
  double growth_target = 0.0;       // 1/(2(1+lambda))
  const RecurrenceRow& at(std::size_t drop, std::size_t horizon) const;
};
// Chains start at 0 with the raw law.
RecurrenceReport recurrence_scan(const ScatterLaw& law, const RecurrenceParams& params, std::uint64_t seed,
                                 int threads);

struct InvarianceRung {
  double n = 0.0;
  long steps = 0;  // [n t]
  KsResult ks;
};
struct InvarianceReport {
  BesselMap map{};
  std::vector<InvarianceRung> rungs;
  bool decreasing = false;  // KS strictly decreasing along the ladder
  bool pass = false;        // decreasing and the top rung passes
  std::vector<double> top_sample, top_reference;
};
// n^{-1/(2+2 lambda)} Y_{[nt]} of the raw power-law chain from 0 against -b X(clock t)^c with
// X a Bessel(delta) process from 0, for the representation `rep` (a raw skeleton representation).
InvarianceReport invariance_marginal_test(const DensityProfile& h, const FlightParams& params, BesselRepresentation rep,
                                          double t, const std::vector<double>& ns, long paths, std::uint64_t seed,
                                          int threads, double alpha = 0.01);

}  // namespace lgrav
