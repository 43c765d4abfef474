#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lgrav/config.hpp"
#include "lgrav/experiments.hpp"

namespace {

void print_result(const lgrav::RunResult& r, const std::string& output) {
  for (const lgrav::Verdict& v : r.verdicts) {
    std::printf("%s %s: statistic=%.6g target=%.6g se=%.3g tolerance=%.3g\n", v.pass ? "PASS" : "FAIL", v.check.c_str(),
                v.statistic, v.target, v.se, v.tolerance);
  }
  for (const lgrav::Diagnostic& d : r.diagnostics) {
    std::printf("  note %s: %.6g (reference %.6g) %s\n", d.check.c_str(), d.statistic, d.target, d.note.c_str());
  }
  std::printf("%s: %s, results in %s\n", r.criterion.empty() ? "run" : r.criterion.c_str(), r.status.c_str(),
              output.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattering-particle simulator and asymptotic verifier"};
  app.require_subcommand(1);

  std::string config_path, output;
  std::uint64_t seed = 0;
  CLI::App* run = app.add_subcommand("run", "Run the experiment described by a JSON config file");
  run->add_option("config", config_path, "Config file")->required();
  CLI::Option* seed_opt = run->add_option("--seed", seed, "Master seed (overrides the config and LGRAV_SEED)");
  CLI::Option* out_opt = run->add_option("--output", output, "Output directory (overrides the config)");

  CLI::App* list = app.add_subcommand("list", "List the built-in acceptance configs");

  std::string name;
  CLI::App* show = app.add_subcommand("show", "Print a built-in config as JSON");
  show->add_option("name", name, "Catalog name, e.g. AC1")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const lgrav::ExperimentConfig& c : lgrav::catalog()) {
        std::printf("%-5s %s%s%s\n", c.name.c_str(), c.kind.c_str(), c.protocol.empty() ? "" : " / ",
                    c.protocol.c_str());
      }
      return 0;
    }
    if (*show) {
      const lgrav::ExperimentConfig* c = lgrav::find_catalog_entry(name);
      if (!c) {
        std::fprintf(stderr, "unknown catalog entry '%s'\n", name.c_str());
        return 2;
      }
      std::cout << lgrav::serialize_config(*c);
      return 0;
    }
    const lgrav::ExperimentConfig config = lgrav::load_config(config_path);
    lgrav::RunOptions opts;
    if (*seed_opt) opts.seed = seed;
    if (*out_opt) opts.output = output;
    const lgrav::RunResult r = lgrav::run_experiment(config, opts);
    print_result(r, opts.output.value_or(config.output));
    return r.pass() ? 0 : 1;
  } catch (const lgrav::ConfigError& e) {
    std::fprintf(stderr, "invalid config: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
