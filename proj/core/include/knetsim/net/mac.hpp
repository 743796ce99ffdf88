#pragma once

#include <vector>

#include "knetsim/net/types.hpp"
#include "knetsim/sim/time.hpp"

namespace knetsim::net {

// Importance-to-reliability mapping. The PHY never interprets meaning; it
// trades loss probability against airtime according to the tier picked from
// the packet's contribution score.
struct ProtectionPolicy {
  double theta_lo = 0.3;
  double theta_hi = 0.7;
  ProtectionLevel light{ProtectionTier::Light, 1.0, 1.0};
  ProtectionLevel standard{ProtectionTier::Standard, 0.5, 1.2};
  ProtectionLevel strong{ProtectionTier::Strong, 0.2, 1.5};

  void validate() const;
};

ProtectionLevel select_protection(const Packet& packet, const ProtectionPolicy& policy);

// Effective per-transmission quantities after protection is applied.
double effective_loss(const Link& link, const ProtectionLevel& level);
std::uint64_t effective_size_bits(const Packet& packet);

enum class ScheduleMode : std::uint8_t { ThroughputMax, Semantic };

struct BlockGrant {
  FlowId flow_id = 0;
  std::uint32_t blocks = 0;
  std::uint64_t bits_granted = 0;  // capped at the flow's backlog
};

struct SchedulerConfig {
  // Urgency ramps from epsilon (deadline far beyond the window) to 1
  // (deadline within epsilon of now).
  double urgency_epsilon = 0.1;
  sim::SimTime deadline_window{100000};  // 100 ms
};

double flow_urgency(const Flow& flow, sim::SimTime now, const SchedulerConfig& cfg);
double flow_priority(const Flow& flow, sim::SimTime now, const SchedulerConfig& cfg);

// Grants the frame's B identical blocks one at a time to the flow with the
// highest marginal value, where value is priority-weighted backlog coverage
// in semantic mode and plain backlog coverage in throughput-max mode. Ties go
// to the lower flow id. Per-block marginal greed is exactly optimal for the
// sum of priority-weighted granted bits because per-flow gains are concave
// in the number of blocks.
std::vector<BlockGrant> allocate_frame(const ResourceFrame& frame,
                                       std::uint64_t link_capacity_bits,
                                       const std::vector<Flow>& flows,
                                       ScheduleMode mode, sim::SimTime now,
                                       const SchedulerConfig& cfg);

struct RetransmitPolicy {
  double rho_initial = 0.1;
  double rho_step = 0.2;
  double rho_cap = 0.9;
  std::uint32_t max_attempts = 4;

  // Score threshold a packet must clear to earn attempt `attempts`;
  // non-decreasing, so low-contribution packets are abandoned first.
  double rho(std::uint32_t attempts) const;
};

bool retransmit_decision(const Packet& packet, std::uint32_t attempts,
                         const RetransmitPolicy& policy);

}  // namespace knetsim::net
