#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgrav/density.hpp"
#include "lgrav/regime.hpp"

namespace lgrav {

// Thrown for invalid configs; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// kind: constant | power_law | named. Built-in names: "inverse-tail" (1/|y| on [-1, 0),
// 1/2 + e^{-2(|y|-1)}/2 below -1; C^2, bounded below by 1/2).
struct DensitySpec {
  std::string kind = "constant";
  double c = 1.0;
  double lambda = 0.0;
  std::string name;
  bool operator==(const DensitySpec&) const = default;
};

DensityProfile make_density(const DensitySpec& spec);
DensityProfile inverse_tail_profile();

struct ExperimentConfig {
  std::string name;
  std::string kind = "simulate";
  std::string protocol;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string output = "out";

  int d = 2;
  std::vector<int> dims;
  double g = 1.0;
  std::vector<DensitySpec> densities{DensitySpec{}};
  std::vector<double> lambdas;
  std::string regime = "raw";
  std::vector<double> n_ladder{1.0};

  double y0 = -1.0;
  std::optional<double> z;
  std::optional<double> v;
  long max_events = 1000;
  long ensemble = 1000;
  long reference = 0;  // reference sample size; 0 means equal to ensemble

  std::vector<double> depths;
  std::vector<double> ud;
  std::vector<double> times;
  double t = 1.0;
  double horizon = 0.0;
  long steps = 0;
  std::vector<long> horizons;
  std::vector<double> drop_factors;

  double tolerance = 0.0;
  double alpha = 0.01;

  bool operator==(const ExperimentConfig&) const = default;
};

// Experiment kinds accepted by `kind`.
const std::vector<std::string>& experiment_kinds();

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
// Canonical JSON (two-space indent, fields in declaration order, trailing newline).
std::string serialize_config(const ExperimentConfig& config);
// Checks every precondition the experiment will rely on; throws ConfigError.
void validate_config(const ExperimentConfig& config);

ScalingRegime make_regime(const std::string& name, double n);

}  // namespace lgrav
