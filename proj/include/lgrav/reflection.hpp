#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "lgrav/rng.hpp"
#include "lgrav/stats.hpp"

namespace lgrav {

// A beam moving along -e_1 hits the unit sphere in R^d at the point (sqrt(1-|b|^2), b), where
// b in R^{d-1} is the impact vector. Angles are measured between the outgoing direction and e_1.

// Theta = 2 asin|b|. Requires |b| < 1.
double reflect(const std::vector<double>& b);
// Outgoing direction by the Householder reflection about the surface normal.
std::vector<double> reflect_direction(const std::vector<double>& b);
// Angle of reflect_direction(b) with e_1, computed with atan2.
double reflect_householder(const std::vector<double>& b);

// P(Theta <= beta) = sin(beta/2)^{d-1}.
double theta_cdf(double beta, int d);
// Normalized area of the cap {v : angle(v, e_1) <= beta} on S^{d-1}.
double cap_measure(double beta, int d);
// f(pi/2) g(pi/4) / (g(pi/2) f(pi/4)) for the densities f of Theta and g of the uniform angle.
double density_ratio_witness(int d);

// Uniform point of the unit (d-1)-ball: normalized Gaussian times U^{1/(d-1)}.
std::vector<double> sample_impact(int d, Rng& rng);

struct UniformityReport {
  int d = 0;
  long samples = 0;
  KsResult vs_theta;   // Theta against theta_cdf
  KsResult vs_cap;     // Theta against cap_measure
  KsResult radius;     // |b| against r^{d-1}
  double max_householder_gap = 0.0;  // max |reflect - reflect_householder| over the draws
  double witness = 0.0;
  std::vector<double> theta;  // sorted
};
UniformityReport uniformity_experiment(int d, long samples, std::uint64_t seed, int threads, double alpha = 0.01);
// Columns: beta,empirical_cdf,theta_cdf,cap_measure on `points` equally spaced beta in [0, pi].
void write_reflection_csv(std::ostream& os, const UniformityReport& report, int points = 181);

}  // namespace lgrav
