#pragma once

#include <cstdint>
#include <string_view>

#include "knetsim/common.hpp"
#include "knetsim/sim/time.hpp"

namespace knetsim::sim {

enum class EventKind : std::uint8_t {
  PacketArrival,
  AgentTick,
  SyncTrigger,
  NegotiationRound,
  MetricSample,
};

std::string_view to_string(EventKind kind);

struct Event {
  SimTime fire_at;
  std::uint64_t seq = 0;  // assigned by the kernel at scheduling time
  EntityId target = 0;
  EventKind kind = EventKind::AgentTick;
  // Payload slots; meaning depends on kind (packet id, session id, ...).
  std::uint64_t arg0 = 0;
  std::uint64_t arg1 = 0;
};

// Dispatch order: earliest fire_at first, scheduling sequence breaks ties so
// same-tick cascades preserve causality.
struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
    return a.seq > b.seq;
  }
};

}  // namespace knetsim::sim
