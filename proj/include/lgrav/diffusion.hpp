#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lgrav/density.hpp"
#include "lgrav/regime.hpp"
#include "lgrav/rng.hpp"

namespace lgrav {

// Generator a(y) f'' + b(y) f' on (-inf, 0).
struct GeneratorSpec {
  std::function<double(double)> a;
  std::function<double(double)> b;
  std::string label;
  double apply(double y, double f1, double f2) const { return a(y) * f2 + b(y) * f1; }
};

// Limit generator of the collision chain in collision time.
GeneratorSpec skeleton_generator(const DensityProfile& h, int d);
// Limit generator in physical time: the skeleton generator times the collision rate
// sqrt(2g|y|) h(y). With mode Raw or PowerLawWindow and a power-law profile, returns
// (sqrt(2g)/(d c)) |y|^{1/2-lambda} [f'' - (d-1)/(2|y|) f'].
GeneratorSpec natural_generator(const DensityProfile& h, int d, double g,
                                ScalingRegime::Mode mode = ScalingRegime::Mode::RescaledDynamics);

class ScaleSpeed {
 public:
  ScaleSpeed(DensityProfile h, int d);
  // G(y) = int_{-1}^{y} h(u) / |u|^{(d-1)/2} du.
  double G(double y) const;
  double G_prime(double y) const;
  double m_density(double y) const;

  struct Kappa {
    double value;                // partial sum at termination
    bool finite;
    int panels;
    std::vector<double> increments;  // per geometric panel [-2^{-k}, -2^{-k-1}]
  };
  // kappa(0) = int_{-1}^{0} [int_{-1}^{u} m(s) ds] h(u)/|u|^{(d-1)/2} du, classified on a geometric grid.
  Kappa kappa_at_zero(int max_panels = 400) const;
  // |a G'' + b G'| / (|a G''| + |b G'| + 1) with five-point differences of G.
  double harmonicity_residual(const GeneratorSpec& gen, double y) const;

 private:
  DensityProfile h_;
  int d_;
};

enum class BesselRepresentation {
  RescaledNatural,          // physical-time limit, rescaled dynamics, h = c|y|^lambda
  RescaledSkeleton,         // collision-time limit, rescaled dynamics
  RawNatural,               // physical-time limit of the raw power-law window
  RawSkeleton,              // collision-time limit of the raw power-law window, stated dimension
  RawSkeletonFromRescaled,  // same limit, dimension implied by the chain's exact one-step moments
};

// Depth process represented as Y_t = -b * X(clock * t)^c with X a Bessel process of dimension delta.
struct BesselMap {
  BesselRepresentation rep;
  double delta;
  double b;
  double c;
  double clock;
  double time_change_dimension;  // dimension of the pure time-change representation (may be <= 0)
  bool sampleable;

  double depth(double x) const;
  double radius(double y) const;
};

BesselMap bessel_map(BesselRepresentation rep, double lambda, int d, double c = 1.0, double g = 1.0);
// Representation used for a regime: rescaled -> RescaledNatural, raw/window -> RawSkeleton.
BesselMap bessel_map(double lambda, int d, ScalingRegime::Mode mode);
// Generator of Y_t = -b X(clock t)^c for X a Bessel(delta) process.
GeneratorSpec mapped_bessel_generator(const BesselMap& map);

// Behaviour at 0 for delta < 2. From x = 0 both start with the entrance law.
enum class BesselBoundary { Absorbing, Reflecting };

// Exact Bessel(delta) values at increasing times via squared-Bessel transitions.
std::vector<double> sample_bessel_path(double delta, double x0, const std::vector<double>& times, Rng& rng,
                                       BesselBoundary boundary = BesselBoundary::Absorbing);
// One exact squared-Bessel transition of the radius x over time dt.
double bessel_step(double delta, double x, double dt, Rng& rng,
                   BesselBoundary boundary = BesselBoundary::Absorbing);

// Bessel(delta) path on a uniform grid stopped at the first passage below `level` > 0.
// Passages between grid points are detected with the Brownian-bridge crossing probability.
struct StoppedBessel {
  double value;  // X at the horizon, or `level` if stopped
  bool stopped;
  double stop_time;
};
StoppedBessel sample_bessel_stopped(double delta, double x0, double level, double horizon, int steps, Rng& rng);

// dY = b(Y) dt + sqrt(2 a(Y)) dW from y0, absorbed at v; steps halve until |b| dt < 0.1 |Y|.
struct EulerPath {
  std::vector<double> t;
  std::vector<double> y;
  bool absorbed = false;
};
EulerPath euler_maruyama(const GeneratorSpec& gen, double y0, double dt, double horizon, double v, Rng& rng,
                         bool keep_path = false);

}  // namespace lgrav
