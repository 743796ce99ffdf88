#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "knetsim/scenario/engine.hpp"

namespace knetsim::scenario {

// Artifact payloads of one run; file contents are fully determined by
// (effective config, seed) except the timing sidecar.
struct RunArtifacts {
  std::string config_echo;
  std::string kernel_trace;
  std::string negotiation_log;
  std::string reasoning_log;
  std::string rejection_log;
  std::string report_block;
  std::string report_csv;
  std::string timing;  // wall clock; excluded from determinism comparisons
  metrics::MetricsReport report;
  int exit_status = 0;
  std::string failure;
};

RunArtifacts execute(const config::RunConfig& cfg);

// Writes every artifact via a temp file and atomic rename so no partial
// file survives a failure.
void write_artifacts(const RunArtifacts& artifacts, const std::filesystem::path& dir);

void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Side-by-side metric table over two runs of the same scenario/seed in
// different modes, with headline ratios.
std::string compare_table(const config::RunConfig& base, const std::string& mode_a,
                          const std::string& mode_b);

struct SweepRow {
  std::string value;
  metrics::MetricsReport report;
};

// Runs the config once per value of `param`, bounded by `workers` threads.
std::vector<SweepRow> run_sweep(const config::RunConfig& base, const std::string& param,
                                const std::vector<std::string>& values,
                                std::size_t workers);

std::string sweep_table(const std::string& param, const std::vector<SweepRow>& rows);

}  // namespace knetsim::scenario
