#pragma once

#include <string>
#include <vector>

#include "modlab/config.hpp"
#include "modlab/report.hpp"

namespace modlab {

struct RunResult {
  std::vector<ReportRow> rows;
  std::size_t asserted = 0;
  std::size_t failed = 0;
  bool all_pass() const { return failed == 0; }
};

// Runs a validated config. Streams are derived from (seed, [kind, schedule index, ...]).
RunResult run_experiment(const ExperimentConfig& config);

// Output path for a config: its output key, or <kind>.<format>, optionally
// redirected into out_dir.
std::string report_path(const ExperimentConfig& config, const std::string& out_dir = {});

ReportMeta report_meta(const ExperimentConfig& config);

}  // namespace modlab
