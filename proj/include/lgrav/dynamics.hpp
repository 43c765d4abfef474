#pragma once

#include <cmath>
#include <vector>

namespace lgrav {

struct FlightParams {
  double g = 1.0;
  int d = 2;
};

// A ballistic flight from depth y0 <= 0 launched with speed sqrt(2 g |y0|) along u.
struct ParabolicFlight {
  double y0 = -1.0;
  std::vector<double> u;
  FlightParams params;

  double ud() const { return u.back(); }
  // Restarted flight at time t: same trajectory, new origin.
  ParabolicFlight advance(double t) const;
};

ParabolicFlight make_flight(double y0, std::vector<double> u, FlightParams params);
// Flight whose direction is e_d scaled to vertical component ud (lateral mass on axis 1).
ParabolicFlight make_flight_ud(double y0, double ud, FlightParams params);

double flight_depth(const ParabolicFlight& f, double t);
double flight_speed(const ParabolicFlight& f, double t);
double arc_length(const ParabolicFlight& f, double t);

// Time to travel unit arc length from depth y <= -1 with vertical direction component ud.
double unit_step_time(double y, double ud, const FlightParams& params);

// Vertical part of a flight; all depth-dependent quantities are functions of these.
struct VerticalMotion {
  double y0, ud, g;
  double v0;       // sqrt(2 g |y0|)
  double vz;       // v0 * ud, initial vertical velocity
  double lateral2; // 2 g |y0| (1 - ud^2)
  double apex;     // y0 (1 - ud^2)
  double apex_time;

  VerticalMotion(double y0, double ud, double g);
  double depth(double t) const {
    const double y = y0 + t * (vz - 0.5 * g * t);
    return y < apex ? y : apex;
  }
  double speed(double t) const {
    const double w = vz - g * t;
    return std::sqrt(lateral2 + w * w);
  }
};

}  // namespace lgrav

