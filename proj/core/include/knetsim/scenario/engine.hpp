#pragma once

#include <string>
#include <vector>

#include "knetsim/metrics/report.hpp"
#include "knetsim/scenario/spec.hpp"

namespace knetsim::scenario {

// Everything a finished run hands to the artifact writer.
struct RunOutcome {
  metrics::RunTrace trace;
  metrics::MetricsReport report;
  std::string kernel_trace;  // rendered `tick,seq,target,kind` lines
  std::vector<std::string> negotiation_log;  // tick,session,round,conflicts,conceding_agent
  std::vector<std::string> reasoning_log;    // tick,agent,action,score,active_duals
  std::vector<std::string> rejection_log;    // tick,subject,kind,reason
  int exit_status = 0;
  std::string failure;  // envelope or module error name when exit_status != 0
};

RunOutcome run_intersection(const ScenarioSpec& spec);
RunOutcome run_xr(const ScenarioSpec& spec);
RunOutcome run_sensing(const ScenarioSpec& spec);
RunOutcome run_dual_toy(const ScenarioSpec& spec);
RunOutcome run_sync_stress(const ScenarioSpec& spec);

RunOutcome run_scenario(const ScenarioSpec& spec);

}  // namespace knetsim::scenario
