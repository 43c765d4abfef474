#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "lgrav/experiments.hpp"

// Usage: acceptance [output-dir] [AC...]. Runs the catalog (or the named entries) and prints
// one PASS/FAIL line per criterion; exits 0 iff every criterion passes.
int main(int argc, char** argv) {
  const std::filesystem::path root = argc > 1 ? argv[1] : "acceptance_out";
  std::vector<std::string> only(argv + std::min(argc, 2), argv + argc);
  std::vector<std::string> lines;
  bool all = true;
  for (const lgrav::ExperimentConfig& c : lgrav::catalog()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    lgrav::RunOptions opts;
    opts.output = (root / c.name).string();
    const lgrav::RunResult r = lgrav::run_experiment(c, opts);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("== %s (%s%s%s) %.1fs, %s\n", c.name.c_str(), c.kind.c_str(), c.protocol.empty() ? "" : "/",
                c.protocol.c_str(), secs, r.status.c_str());
    for (const lgrav::Verdict& v : r.verdicts) {
      std::printf("   %s %s: statistic=%.6g target=%.6g se=%.3g tolerance=%.3g\n", v.pass ? "pass" : "FAIL",
                  v.check.c_str(), v.statistic, v.target, v.se, v.tolerance);
    }
    for (const lgrav::Diagnostic& d : r.diagnostics) {
      std::printf("   note %s: %.6g (reference %.6g, se %.3g) %s\n", d.check.c_str(), d.statistic, d.target, d.se,
                  d.note.c_str());
    }
    std::fflush(stdout);
    char line[128];
    std::snprintf(line, sizeof line, "%-5s %s", c.name.c_str(), r.pass() ? "PASS" : "FAIL");
    lines.push_back(line);
    all = all && r.pass();
  }
  std::printf("\n");
  for (const std::string& l : lines) std::printf("%s\n", l.c_str());
  return all ? 0 : 1;
}
