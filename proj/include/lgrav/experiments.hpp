#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lgrav/config.hpp"

namespace lgrav {

struct Verdict {
  std::string criterion;
  std::string check;  // sub-check label, e.g. "d=2 lambda=1"
  double rung = 0.0;  // ladder parameter of the decisive rung (0 when not a ladder)
  double statistic = 0.0;
  double target = 0.0;
  double se = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Reported alongside verdicts; never affects the exit status.
struct Diagnostic {
  std::string check;
  double statistic = 0.0;
  double target = 0.0;
  double se = 0.0;
  std::string note;
};

struct RunResult {
  std::string criterion;
  std::string status = "complete";  // or "failed: <reason>"
  std::vector<Verdict> verdicts;
  std::vector<Diagnostic> diagnostics;
  std::vector<std::string> files;  // data files written, relative to the output directory
  bool pass() const;
};

struct RunOptions {
  std::optional<int> threads;          // bypasses LGRAV_THREADS and the config value
  std::optional<std::uint64_t> seed;   // bypasses LGRAV_SEED and the config value
  std::optional<std::string> output;   // replaces config.output
};

// Validates, runs and writes manifest.json, data files and (for verification kinds) verdict.json.
// Exceptions from the experiment are caught and reported in the manifest status.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// One canned config per acceptance criterion, named AC1..AC15.
const std::vector<ExperimentConfig>& catalog();
const ExperimentConfig* find_catalog_entry(const std::string& name);
// Same experiment at a scale suited to repeated reruns.
ExperimentConfig reduced_config(const ExperimentConfig& config);

std::string code_version();

}  // namespace lgrav
