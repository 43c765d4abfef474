#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "lgrav/config.hpp"
#include "lgrav/experiments.hpp"

using namespace lgrav;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lgrav_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

std::string field_of(const std::string& text) {
  try {
    validate_config(parse_config(text));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

ExperimentConfig simulate_config(const fs::path& out) {
  ExperimentConfig c;
  c.name = "sim";
  c.kind = "simulate";
  c.densities = {DensitySpec{"power_law", 1.0, 1.0, ""}};
  c.d = 3;
  c.y0 = -2.0;
  c.max_events = 50;
  c.ensemble = 40;
  c.seed = 77;
  c.output = out.string();
  return c;
}

}  // namespace

TEST_CASE("config round trip") {
  ExperimentConfig c;
  c.name = "x";
  c.kind = "recurrence";
  c.dims = {1, 4};
  c.lambdas = {0.0, 0.5};
  c.v = -1.0;
  c.z = -3.0;
  c.densities = {DensitySpec{"power_law", 1.5, 0.5, ""}, DensitySpec{"named", 1.0, 0.0, "inverse-tail"}};
  c.horizons = {10, 100};
  c.drop_factors = {10.0};
  c.ud = {0.1, -0.7071067811865476};
  c.seed = 18446744073709551615ULL;
  c.g = 0.1;
  CHECK(parse_config(serialize_config(c)) == c);
  CHECK(serialize_config(parse_config(serialize_config(c))) == serialize_config(c));
  CHECK(parse_config("{}") == ExperimentConfig{});
}

TEST_CASE("unknown and mistyped fields are rejected by path") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"kind": "simulate", "bogus": 1})"), "bogus: unknown field", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"densities": [{"kind": "constant", "c": 1, "shape": 2}]})"),
                       "densities[0].shape: unknown field", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"n_ladder": [1, "ten"]})"), "n_ladder[1]: expected a number", ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("validation names the offending field") {
  CHECK(field_of(R"({"kind": "teleport"})") == "kind");
  CHECK(field_of(R"({"d": 0})") == "d");
  CHECK(field_of(R"({"g": -1})") == "g");
  CHECK(field_of(R"({"kind": "limits", "protocol": "nope"})") == "protocol");
  CHECK(field_of(R"({"densities": [{"kind": "power_law", "c": 1, "lambda": -1}]})") == "densities[0]");
  CHECK(field_of(R"({"densities": [{"kind": "named", "name": "mystery"}]})") == "densities[0]");
  CHECK(field_of(R"({"n_ladder": [10, 5]})") == "n_ladder");
  CHECK(field_of(R"({"kind": "clock", "v": -2, "y0": -1})") == "y0");
  CHECK(field_of(R"({"kind": "reflection", "dims": [1]})") == "dims");
  CHECK(field_of(R"({"kind": "recurrence", "dims": [2], "lambdas": [0], "v": -1, "horizons": [10], "drop_factors": [0.5]})") ==
        "drop_factors");
  CHECK(field_of(R"({"kind": "simulate"})") == "");
}

TEST_CASE("catalog") {
  const auto& cat = catalog();
  CHECK(cat.size() >= 10);
  for (std::size_t i = 0; i < cat.size(); ++i) {
    CHECK(cat[i].name == "AC" + std::to_string(i + 1));
    CHECK(parse_config(serialize_config(cat[i])) == cat[i]);
    CHECK_NOTHROW(validate_config(cat[i]));
    CHECK_NOTHROW(validate_config(reduced_config(cat[i])));
    CHECK(find_catalog_entry(cat[i].name) == &cat[i]);
  }
  CHECK(find_catalog_entry("AC0") == nullptr);
}

TEST_CASE("README documents every catalog entry") {
  const std::string readme = slurp(fs::path(LGRAV_SOURCE_DIR) / "README.md");
  for (const ExperimentConfig& c : catalog()) CHECK(readme.find("| " + c.name + " |") != std::string::npos);
}

TEST_CASE("simulate with no events writes an empty event file and a manifest") {
  const fs::path out = scratch("empty");
  ExperimentConfig c = simulate_config(out);
  c.max_events = 0;
  const RunResult r = run_experiment(c);
  CHECK(r.status == "complete");
  CHECK(fs::exists(out / "manifest.json"));
  CHECK(fs::file_size(out / "events.jsonl") == 0);
  CHECK_FALSE(fs::exists(out / "summary.csv"));
  CHECK_FALSE(fs::exists(out / "verdict.json"));
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["seed"] == 77);
  CHECK(m["config"]["max_events"] == 0);
  CHECK(m["tool"] == code_version());
  fs::remove_all(out);
}

TEST_CASE("simulate output is reproducible across runs and worker counts") {
  const fs::path a = scratch("a"), b = scratch("b"), t = scratch("t");
  run_experiment(simulate_config(a), RunOptions{1, std::nullopt, std::nullopt});
  run_experiment(simulate_config(b), RunOptions{1, std::nullopt, std::nullopt});
  run_experiment(simulate_config(t), RunOptions{3, std::nullopt, std::nullopt});
  for (const char* f : {"events.jsonl", "summary.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / f) == slurp(t / f));
  }
  CHECK(slurp(a / "events.jsonl").find("\"path\":39") != std::string::npos);
  const fs::path s = scratch("s");
  run_experiment(simulate_config(s), RunOptions{1, 78, std::nullopt});
  CHECK(slurp(a / "events.jsonl") != slurp(s / "events.jsonl"));
  for (const fs::path& p : {a, b, t, s}) fs::remove_all(p);
}

TEST_CASE("environment overrides seed and threads") {
  const fs::path a = scratch("env");
  ::setenv("LGRAV_SEED", "5", 1);
  ::setenv("LGRAV_THREADS", "2", 1);
  run_experiment(simulate_config(a));
  ::unsetenv("LGRAV_SEED");
  ::unsetenv("LGRAV_THREADS");
  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["seed"] == 5);
  CHECK(m["threads"] == 2);
  fs::remove_all(a);
}

TEST_CASE("verification runs write verdicts") {
  const fs::path out = scratch("refl");
  ExperimentConfig c;
  c.name = "refl";
  c.kind = "reflection";
  c.dims = {2, 3};
  c.ensemble = 100000;
  c.output = out.string();
  const RunResult r = run_experiment(c);
  CHECK(r.pass());
  const auto v = nlohmann::json::parse(slurp(out / "verdict.json"));
  CHECK(v["pass"] == true);
  CHECK(v["verdicts"].size() == 8);
  for (const auto& e : v["verdicts"]) {
    for (const char* k : {"criterion", "statistic", "target", "tolerance", "pass"}) CHECK(e.contains(k));
  }
  CHECK(fs::exists(out / "reflection_d2.csv"));
  fs::remove_all(out);
}

TEST_CASE("failures are flagged as partial output") {
  const fs::path out = scratch("fail");
  fs::create_directories(out / "events.jsonl");  // blocks the data file
  const RunResult r = run_experiment(simulate_config(out));
  CHECK(r.status.rfind("failed", 0) == 0);
  CHECK_FALSE(r.pass());
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["partial"] == true);
  fs::remove_all(out);
}
