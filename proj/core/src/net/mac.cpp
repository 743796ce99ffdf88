#include "knetsim/net/mac.hpp"

#include <algorithm>
#include <cmath>

namespace knetsim::net {

void ProtectionPolicy::validate() const {
  if (!(theta_lo < theta_hi)) {
    throw Error("InvalidValue", "protection thresholds require theta_lo < theta_hi");
  }
  const bool loss_ok = strong.loss_multiplier < standard.loss_multiplier &&
                       standard.loss_multiplier < light.loss_multiplier;
  const bool cost_ok = strong.capacity_cost_multiplier > standard.capacity_cost_multiplier &&
                       standard.capacity_cost_multiplier > light.capacity_cost_multiplier;
  if (!loss_ok || !cost_ok) {
    throw Error("InvalidValue",
                "protection tiers must trade loss monotonically against capacity cost");
  }
}

ProtectionLevel select_protection(const Packet& packet, const ProtectionPolicy& policy) {
  if (packet.contribution_score < 0.0 || packet.contribution_score > 1.0) {
    throw Error("InvalidValue", "contribution_score outside [0, 1]");
  }
  if (packet.contribution_score >= policy.theta_hi) return policy.strong;
  if (packet.contribution_score < policy.theta_lo) return policy.light;
  return policy.standard;
}

double effective_loss(const Link& link, const ProtectionLevel& level) {
  return std::min(1.0, link.base_loss * level.loss_multiplier);
}

std::uint64_t effective_size_bits(const Packet& packet) {
  const double scaled =
      static_cast<double>(packet.size_bits) * packet.protection.capacity_cost_multiplier;
  return static_cast<std::uint64_t>(std::llround(scaled));
}

double flow_urgency(const Flow& flow, sim::SimTime now, const SchedulerConfig& cfg) {
  const double window = static_cast<double>(cfg.deadline_window.ticks);
  double remaining = 0.0;
  if (flow.deadline > now) {
    remaining = static_cast<double>(flow.deadline.ticks - now.ticks) / window;
  }
  const double eps = cfg.urgency_epsilon;
  const double clamped = std::clamp(remaining, eps, 1.0);
  // Inverse of the remaining-time fraction, rescaled so urgency lives in
  // [eps, 1] with 1 meaning the deadline is (nearly) upon us.
  return eps / clamped;
}

double flow_priority(const Flow& flow, sim::SimTime now, const SchedulerConfig& cfg) {
  return flow.semantic_weight * flow_urgency(flow, now, cfg);
}

std::vector<BlockGrant> allocate_frame(const ResourceFrame& frame,
                                       std::uint64_t link_capacity_bits,
                                       const std::vector<Flow>& flows,
                                       ScheduleMode mode, sim::SimTime now,
                                       const SchedulerConfig& cfg) {
  if (frame.block_count == 0) {
    throw Error("EmptyFrame", "frame has zero resource blocks");
  }
  const std::uint64_t block_bits = link_capacity_bits / frame.block_count;

  struct State {
    const Flow* flow;
    double priority;
    std::uint64_t residual;
    std::uint32_t blocks = 0;
    std::uint64_t bits = 0;
  };
  std::vector<State> states;
  states.reserve(flows.size());
  for (const auto& f : flows) {
    if (f.semantic_weight < 0.0 || f.semantic_weight > 1.0) {
      throw Error("InvalidValue", "semantic_weight outside [0, 1]");
    }
    const double prio =
        mode == ScheduleMode::Semantic ? flow_priority(f, now, cfg) : 1.0;
    states.push_back({&f, prio, f.remaining_bits});
  }

  for (std::uint32_t b = 0; b < frame.block_count; ++b) {
    State* best = nullptr;
    double best_gain = 0.0;
    for (auto& st : states) {
      const std::uint64_t usable = std::min(block_bits, st.residual);
      if (usable == 0) continue;
      const double gain = st.priority * static_cast<double>(usable);
      const bool wins = best == nullptr || gain > best_gain ||
                        (gain == best_gain && st.flow->id < best->flow->id);
      if (wins) {
        best = &st;
        best_gain = gain;
      }
    }
    if (best == nullptr) break;  // all backlogs covered
    const std::uint64_t usable = std::min(block_bits, best->residual);
    best->blocks += 1;
    best->bits += usable;
    best->residual -= usable;
  }

  std::vector<BlockGrant> grants;
  for (const auto& st : states) {
    if (st.blocks > 0) {
      grants.push_back({st.flow->id, st.blocks, st.bits});
    }
  }
  return grants;
}

double RetransmitPolicy::rho(std::uint32_t attempts) const {
  if (attempts < 1) {
    throw Error("InvalidValue", "retransmit attempts start at 1");
  }
  return std::min(rho_cap, rho_initial + rho_step * static_cast<double>(attempts - 1));
}

bool retransmit_decision(const Packet& packet, std::uint32_t attempts,
                         const RetransmitPolicy& policy) {
  if (attempts >= policy.max_attempts) return false;
  return packet.contribution_score >= policy.rho(attempts);
}

}  // namespace knetsim::net
