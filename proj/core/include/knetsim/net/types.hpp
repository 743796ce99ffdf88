#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "knetsim/common.hpp"
#include "knetsim/sim/time.hpp"

namespace knetsim::net {

enum class NodeLevel : std::uint8_t { UserEquipment, Edge, BaseStation, Regional };

std::string_view to_string(NodeLevel level);

struct Node {
  EntityId id = 0;
  NodeLevel level = NodeLevel::UserEquipment;
  double compute_budget = 1.0;  // abstract ops per tick
};

struct Link {
  EntityId src = 0;
  EntityId dst = 0;
  std::uint64_t capacity_bits_per_frame = 0;
  sim::SimTime base_latency{};
  double base_loss = 0.0;  // Bernoulli loss probability in [0, 1)
};

using FlowId = std::uint32_t;

struct Flow {
  FlowId id = 0;
  EntityId src = 0;
  EntityId dst = 0;
  double semantic_weight = 0.5;  // in [0, 1]
  std::uint32_t task_id = 0;
  sim::SimTime deadline{};
  std::uint64_t remaining_bits = 0;
};

enum class ProtectionTier : std::uint8_t { Light, Standard, Strong };

std::string_view to_string(ProtectionTier tier);

struct ProtectionLevel {
  ProtectionTier tier = ProtectionTier::Standard;
  double loss_multiplier = 1.0;      // scales link base_loss down as tier rises
  double capacity_cost_multiplier = 1.0;  // scales airtime up as tier rises
};

struct Packet {
  FlowId flow_id = 0;
  std::uint64_t size_bits = 0;
  bool relevance_flag = false;  // task-utility proxy output, scenario ground truth
  double contribution_score = 0.0;  // in [0, 1]
  ProtectionLevel protection{};
};

struct ResourceFrame {
  std::uint64_t frame_index = 0;
  std::uint32_t block_count = 0;  // B identical blocks, capacity/B bits each
};

}  // namespace knetsim::net
