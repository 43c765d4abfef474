#include "lgrav/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"

namespace lgrav {

using nlohmann::json;
using nlohmann::ordered_json;

DensityProfile inverse_tail_profile() {
  DensityProfile::Custom c;
  c.h = [](double y) {
    const double r = -y;
    return r <= 1.0 ? 1.0 / r : 0.5 + 0.5 * std::exp(-2.0 * (r - 1.0));
  };
  c.dh = [](double y) {
    const double r = -y;
    // d/dy = -d/dr.
    return r <= 1.0 ? 1.0 / (r * r) : std::exp(-2.0 * (r - 1.0));
  };
  c.witness = [](double) { return 0.5; };
  c.name = "inverse-tail";
  return DensityProfile::tabulated(std::move(c));
}

DensityProfile make_density(const DensitySpec& s) {
  if (s.kind == "constant") return DensityProfile::constant(s.c);
  if (s.kind == "power_law") return DensityProfile::power_law(s.c, s.lambda);
  if (s.kind == "named") {
    if (s.name == "inverse-tail") return inverse_tail_profile();
    throw std::invalid_argument("unknown built-in density '" + s.name + "'");
  }
  throw std::invalid_argument("unknown density kind '" + s.kind + "'");
}

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"simulate",   "verify-moments", "verify-fluctuations", "invariance",
                                              "recurrence", "limits",         "reflection",          "clock",
                                              "reproducibility"};
  return kinds;
}

ScalingRegime make_regime(const std::string& name, double n) {
  if (name == "raw") return ScalingRegime::raw();
  if (name == "rescaled") return ScalingRegime::rescaled(n);
  if (name == "window") return ScalingRegime::window(n);
  throw std::invalid_argument("unknown regime '" + name + "'");
}

namespace {

// Typed readers that report the field path on mismatch.
double as_double(const json& j, const std::string& f) {
  if (!j.is_number()) throw ConfigError(f, "expected a number");
  return j.get<double>();
}

long as_long(const json& j, const std::string& f) {
  if (!j.is_number_integer()) throw ConfigError(f, "expected an integer");
  return j.get<long>();
}

std::string as_string(const json& j, const std::string& f) {
  if (!j.is_string()) throw ConfigError(f, "expected a string");
  return j.get<std::string>();
}

template <class T, class Read>
std::vector<T> as_list(const json& j, const std::string& f, Read read) {
  if (!j.is_array()) throw ConfigError(f, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read(j[i], f + "[" + std::to_string(i) + "]"));
  return out;
}

DensitySpec as_density(const json& j, const std::string& f) {
  if (!j.is_object()) throw ConfigError(f, "expected an object");
  DensitySpec d;
  for (const auto& [key, value] : j.items()) {
    const std::string p = f + "." + key;
    if (key == "kind") d.kind = as_string(value, p);
    else if (key == "c") d.c = as_double(value, p);
    else if (key == "lambda") d.lambda = as_double(value, p);
    else if (key == "name") d.name = as_string(value, p);
    else throw ConfigError(p, "unknown field");
  }
  return d;
}

using Setter = std::function<void(ExperimentConfig&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s{
      {"name", [](ExperimentConfig& c, const json& j, const std::string& f) { c.name = as_string(j, f); }},
      {"kind", [](ExperimentConfig& c, const json& j, const std::string& f) { c.kind = as_string(j, f); }},
      {"protocol", [](ExperimentConfig& c, const json& j, const std::string& f) { c.protocol = as_string(j, f); }},
      {"seed",
       [](ExperimentConfig& c, const json& j, const std::string& f) {
         if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
           throw ConfigError(f, "expected a non-negative integer");
         }
         c.seed = j.get<std::uint64_t>();
       }},
      {"threads", [](ExperimentConfig& c, const json& j, const std::string& f) { c.threads = static_cast<int>(as_long(j, f)); }},
      {"output", [](ExperimentConfig& c, const json& j, const std::string& f) { c.output = as_string(j, f); }},
      {"d", [](ExperimentConfig& c, const json& j, const std::string& f) { c.d = static_cast<int>(as_long(j, f)); }},
      {"dims",
       [](ExperimentConfig& c, const json& j, const std::string& f) {
         c.dims = as_list<int>(j, f, [](const json& x, const std::string& p) { return static_cast<int>(as_long(x, p)); });
       }},
      {"g", [](ExperimentConfig& c, const json& j, const std::string& f) { c.g = as_double(j, f); }},
      {"densities",
       [](ExperimentConfig& c, const json& j, const std::string& f) { c.densities = as_list<DensitySpec>(j, f, as_density); }},
      {"lambdas", [](ExperimentConfig& c, const json& j, const std::string& f) { c.lambdas = as_list<double>(j, f, as_double); }},
      {"regime", [](ExperimentConfig& c, const json& j, const std::string& f) { c.regime = as_string(j, f); }},
      {"n_ladder", [](ExperimentConfig& c, const json& j, const std::string& f) { c.n_ladder = as_list<double>(j, f, as_double); }},
      {"y0", [](ExperimentConfig& c, const json& j, const std::string& f) { c.y0 = as_double(j, f); }},
      {"z",
       [](ExperimentConfig& c, const json& j, const std::string& f) {
         c.z = j.is_null() ? std::nullopt : std::optional<double>(as_double(j, f));
       }},
      {"v",
       [](ExperimentConfig& c, const json& j, const std::string& f) {
         c.v = j.is_null() ? std::nullopt : std::optional<double>(as_double(j, f));
       }},
      {"max_events", [](ExperimentConfig& c, const json& j, const std::string& f) { c.max_events = as_long(j, f); }},
      {"ensemble", [](ExperimentConfig& c, const json& j, const std::string& f) { c.ensemble = as_long(j, f); }},
      {"reference", [](ExperimentConfig& c, const json& j, const std::string& f) { c.reference = as_long(j, f); }},
      {"depths", [](ExperimentConfig& c, const json& j, const std::string& f) { c.depths = as_list<double>(j, f, as_double); }},
      {"ud", [](ExperimentConfig& c, const json& j, const std::string& f) { c.ud = as_list<double>(j, f, as_double); }},
      {"times", [](ExperimentConfig& c, const json& j, const std::string& f) { c.times = as_list<double>(j, f, as_double); }},
      {"t", [](ExperimentConfig& c, const json& j, const std::string& f) { c.t = as_double(j, f); }},
      {"horizon", [](ExperimentConfig& c, const json& j, const std::string& f) { c.horizon = as_double(j, f); }},
      {"steps", [](ExperimentConfig& c, const json& j, const std::string& f) { c.steps = as_long(j, f); }},
      {"horizons", [](ExperimentConfig& c, const json& j, const std::string& f) { c.horizons = as_list<long>(j, f, as_long); }},
      {"drop_factors",
       [](ExperimentConfig& c, const json& j, const std::string& f) { c.drop_factors = as_list<double>(j, f, as_double); }},
      {"tolerance", [](ExperimentConfig& c, const json& j, const std::string& f) { c.tolerance = as_double(j, f); }},
      {"alpha", [](ExperimentConfig& c, const json& j, const std::string& f) { c.alpha = as_double(j, f); }},
  };
  return s;
}

ordered_json density_json(const DensitySpec& d) {
  ordered_json j;
  j["kind"] = d.kind;
  j["c"] = d.c;
  j["lambda"] = d.lambda;
  j["name"] = d.name;
  return j;
}

bool increasing(const std::vector<double>& x) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) return false;
  }
  return true;
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

void require_protocol(const ExperimentConfig& c, std::initializer_list<const char*> allowed) {
  for (const char* p : allowed) {
    if (c.protocol == p) return;
  }
  std::string list;
  for (const char* p : allowed) list += std::string(list.empty() ? "" : ", ") + p;
  throw ConfigError("protocol", "'" + c.protocol + "' is not one of {" + list + "} for kind " + c.kind);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("(document)", e.what());
  }
  if (!j.is_object()) throw ConfigError("(document)", "expected a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, "unknown field");
    it->second(c, value, key);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  ordered_json j;
  j["name"] = c.name;
  j["kind"] = c.kind;
  j["protocol"] = c.protocol;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["output"] = c.output;
  j["d"] = c.d;
  j["dims"] = c.dims;
  j["g"] = c.g;
  j["densities"] = ordered_json::array();
  for (const DensitySpec& d : c.densities) j["densities"].push_back(density_json(d));
  j["lambdas"] = c.lambdas;
  j["regime"] = c.regime;
  j["n_ladder"] = c.n_ladder;
  j["y0"] = c.y0;
  j["z"] = c.z ? ordered_json(*c.z) : ordered_json(nullptr);
  j["v"] = c.v ? ordered_json(*c.v) : ordered_json(nullptr);
  j["max_events"] = c.max_events;
  j["ensemble"] = c.ensemble;
  j["reference"] = c.reference;
  j["depths"] = c.depths;
  j["ud"] = c.ud;
  j["times"] = c.times;
  j["t"] = c.t;
  j["horizon"] = c.horizon;
  j["steps"] = c.steps;
  j["horizons"] = c.horizons;
  j["drop_factors"] = c.drop_factors;
  j["tolerance"] = c.tolerance;
  j["alpha"] = c.alpha;
  return j.dump(2) + "\n";
}

void validate_config(const ExperimentConfig& c) {
  const auto& kinds = experiment_kinds();
  require(std::find(kinds.begin(), kinds.end(), c.kind) != kinds.end(), "kind", "unknown experiment kind '" + c.kind + "'");
  require(c.threads >= 0, "threads", "must be >= 0");
  require(!c.output.empty(), "output", "must not be empty");
  require(c.d >= 1, "d", "must be >= 1");
  for (std::size_t i = 0; i < c.dims.size(); ++i) require(c.dims[i] >= 1, "dims[" + std::to_string(i) + "]", "must be >= 1");
  require(c.g > 0.0 && std::isfinite(c.g), "g", "must be > 0");
  require(c.alpha > 0.0 && c.alpha < 1.0, "alpha", "must be in (0, 1)");
  require(c.tolerance >= 0.0, "tolerance", "must be >= 0");
  require(!c.densities.empty(), "densities", "need at least one density");
  for (std::size_t i = 0; i < c.densities.size(); ++i) {
    try {
      make_density(c.densities[i]);
    } catch (const std::exception& e) {
      throw ConfigError("densities[" + std::to_string(i) + "]", e.what());
    }
  }
  for (std::size_t i = 0; i < c.lambdas.size(); ++i) {
    require(c.lambdas[i] >= 0.0, "lambdas[" + std::to_string(i) + "]", "must be >= 0");
  }
  require(c.regime == "raw" || c.regime == "rescaled" || c.regime == "window", "regime",
          "must be raw, rescaled or window");
  require(!c.n_ladder.empty(), "n_ladder", "need at least one rung");
  for (std::size_t i = 0; i < c.n_ladder.size(); ++i) {
    require(c.n_ladder[i] >= 1.0, "n_ladder[" + std::to_string(i) + "]", "must be >= 1");
  }
  require(increasing(c.n_ladder), "n_ladder", "must be strictly increasing");
  require(c.ensemble >= 0, "ensemble", "must be >= 0");
  require(c.reference >= 0, "reference", "must be >= 0");
  if (c.v) require(*c.v < 0.0, "v", "must be < 0");
  if (c.z && c.v) require(*c.z < *c.v, "z", "must be below v");
  for (std::size_t i = 0; i < c.ud.size(); ++i) {
    require(std::abs(c.ud[i]) <= 1.0, "ud[" + std::to_string(i) + "]", "must be in [-1, 1]");
  }
  const bool monotone_depths = increasing(c.depths) || increasing([&] {
    std::vector<double> a(c.depths);
    for (double& x : a) x = -x;
    return a;
  }());
  const bool power = [&] {
    for (const DensitySpec& d : c.densities) {
      if (d.kind == "named") return false;
    }
    return true;
  }();

  if (c.kind == "simulate") {
    require(c.y0 <= 0.0, "y0", "must be <= 0");
    require(c.max_events >= 0, "max_events", "must be >= 0");
    require(c.ensemble >= 1, "ensemble", "must be >= 1");
    require(c.regime != "window" || power, "regime", "window requires a power-law density");
  } else if (c.kind == "limits") {
    require_protocol(c, {"survival-scale", "entrance", "scale-speed", "dimension-arithmetic", "deterministic"});
    if (c.protocol == "survival-scale") {
      require(c.depths.size() >= 2 && monotone_depths, "depths", "need at least two strictly monotone depths");
      require(!c.ud.empty(), "ud", "need at least one direction");
      for (double y : c.depths) require(y < 0.0, "depths", "must be < 0");
    } else if (c.protocol == "entrance") {
      require(!c.lambdas.empty(), "lambdas", "need at least one lambda");
      require(c.ensemble >= 100, "ensemble", "need at least 100 samples");
    } else if (c.protocol == "deterministic") {
      require(c.y0 < 0.0, "y0", "must be < 0");
      require(c.ud.size() == 1 && c.ud[0] > 0.0 && c.ud[0] < 1.0, "ud", "need one value in (0, 1)");
    } else if (c.protocol == "dimension-arithmetic") {
      require(!c.dims.empty(), "dims", "need at least one dimension");
      require(!c.lambdas.empty(), "lambdas", "need at least one lambda");
    } else if (c.protocol == "scale-speed") {
      require(!c.depths.empty(), "depths", "need a harmonicity grid");
      for (double y : c.depths) require(y < 0.0, "depths", "must be < 0");
    }
  } else if (c.kind == "verify-moments") {
    require_protocol(c, {"flight-moments", "martingale", "one-step"});
    require(!c.depths.empty(), "depths", "need at least one depth");
    for (double y : c.depths) require(y < 0.0, "depths", "must be < 0");
    if (c.protocol == "flight-moments") require(!c.ud.empty(), "ud", "need at least one direction");
    if (c.protocol != "martingale") require(monotone_depths, "depths", "must be strictly monotone");
    if (c.protocol == "martingale") {
      require(c.depths.size() == c.densities.size() && c.ud.size() == c.densities.size(), "depths",
              "martingale configurations pair densities[i], depths[i] and ud[i]");
      require(c.ensemble >= 100, "ensemble", "need at least 100 samples");
    }
    if (c.protocol == "one-step") {
      require(power, "densities", "one-step moments need power-law densities");
      require(!c.dims.empty() && c.dims.size() == c.lambdas.size(), "dims", "pair dims[i] with lambdas[i]");
      require(c.ensemble >= 100, "ensemble", "need at least 100 samples");
    }
  } else if (c.kind == "verify-fluctuations") {
    require(!c.ud.empty(), "ud", "need at least one direction");
    for (double u : c.ud) require(u != 0.0, "ud", "must be nonzero (the normalized statistic divides by u_d)");
    require(!c.depths.empty() && monotone_depths, "depths", "need strictly monotone depths");
  } else if (c.kind == "invariance") {
    require_protocol(c, {"raw-skeleton", "rescaled-cutoff"});
    require(c.ensemble >= 100, "ensemble", "need at least 100 paths");
    require(c.t >= 0.0, "t", "must be >= 0");
    if (c.protocol == "raw-skeleton") {
      require(!c.dims.empty() && c.dims.size() == c.lambdas.size(), "dims", "pair dims[i] with lambdas[i]");
    } else {
      require(c.v.has_value(), "v", "required for the cutoff protocol");
      require(c.y0 < *c.v, "y0", "must be below v");
      require(c.steps >= 1, "steps", "reference grid needs steps >= 1");
    }
  } else if (c.kind == "clock") {
    require(c.v.has_value(), "v", "required");
    require(c.y0 < *c.v, "y0", "must be below v");
    require(c.t > 0.0, "t", "skeleton horizon must be > 0");
    require(c.ensemble >= 1, "ensemble", "must be >= 1");
  } else if (c.kind == "recurrence") {
    require(!c.dims.empty(), "dims", "need at least one dimension");
    require(!c.lambdas.empty(), "lambdas", "need at least one lambda");
    require(c.v.has_value(), "v", "return level required");
    require(!c.horizons.empty(), "horizons", "need at least one horizon");
    for (std::size_t i = 0; i < c.horizons.size(); ++i) {
      require(c.horizons[i] >= 1 && (i == 0 || c.horizons[i] > c.horizons[i - 1]), "horizons",
              "must be positive and increasing");
    }
    require(!c.drop_factors.empty(), "drop_factors", "need at least one factor");
    for (double f : c.drop_factors) require(f > 1.0, "drop_factors", "must be > 1");
    require(c.ensemble >= 1, "ensemble", "must be >= 1");
  } else if (c.kind == "reflection") {
    require(!c.dims.empty(), "dims", "need at least one dimension");
    for (int d : c.dims) require(d >= 2, "dims", "must be >= 2");
    require(c.ensemble >= 10000, "ensemble", "need at least 10^4 draws");
  } else if (c.kind == "reproducibility") {
    require(c.tolerance > 0.0, "tolerance", "aggregate tolerance must be > 0");
  }
}

}  // namespace lgrav
