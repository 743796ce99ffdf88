#pragma once

#include <string>
#include <vector>

#include "knetsim/config/config.hpp"
#include "knetsim/kb/replica.hpp"
#include "knetsim/kb/sync.hpp"
#include "knetsim/metrics/report.hpp"
#include "knetsim/net/mac.hpp"
#include "knetsim/net/routing.hpp"
#include "knetsim/sim/kernel.hpp"

namespace knetsim::scenario {

// Run modes mirror the deployment phases: raw streaming only, semantic
// messaging with importance-aware transport, or every plane active
// (negotiation, knowledge sync, priors, duals, shadow validation).
enum class Mode : std::uint8_t { DataCentric, Semantic, FullKraken };

Mode mode_from(const std::string& name);
std::string_view to_string(Mode mode);

// Config-derived policy bundle shared by every scenario.
struct Policies {
  net::ProtectionPolicy protection;
  net::RetransmitPolicy retransmit;
  net::SchedulerConfig scheduler;
  net::RoutingWeights routing;
  kb::DeltaPolicy delta;
  double tau_slow = 0.5;
  double delta_ground = 0.5;
  std::uint64_t sync_message_bits = 256;
  std::uint64_t sync_object_bits = 512;

  static Policies from(const config::RunConfig& cfg);
};

// Validated scenario instantiation: the typed view the runner executes.
struct ScenarioSpec {
  std::string name;
  Mode mode = Mode::FullKraken;
  std::uint64_t seed = 1;
  sim::SimTime horizon{};
  config::RunConfig cfg;
};

// Builders validate ranges (InvalidCount for out-of-range agent counts) and
// pick the scenario's natural horizon when none is configured.
ScenarioSpec build_intersection(const config::RunConfig& cfg);
ScenarioSpec build_xr(const config::RunConfig& cfg);
ScenarioSpec build_sensing(const config::RunConfig& cfg);
ScenarioSpec build_dual_toy(const config::RunConfig& cfg);
ScenarioSpec build_sync_stress(const config::RunConfig& cfg);
ScenarioSpec build_scenario(const config::RunConfig& cfg);

std::vector<kb::ObjectKind> parse_sync_kinds(const std::string& csv);

// One message attempt over a link with importance-aware protection and
// retransmission. Every attempt's airtime is recorded in the trace;
// `relevant` marks only the task-novel payload.
struct SendOutcome {
  bool delivered = false;
  std::uint32_t attempts = 0;
};

SendOutcome send_message(sim::Kernel& kernel, metrics::RunTrace& trace,
                         const net::Link& link, std::uint64_t payload_bits,
                         double contribution_score, bool relevant, double semantic_weight,
                         const Policies& policies, const std::string& category,
                         bool protected_transport);

// Raw-frame recording: one loss draw for the frame, split into the novel
// part (if any) and padding so relevance accounting stays exact.
void send_raw_frame(sim::Kernel& kernel, metrics::RunTrace& trace, const net::Link& link,
                    std::uint64_t frame_bits, std::uint64_t novel_bits,
                    const std::string& category);

}  // namespace knetsim::scenario
