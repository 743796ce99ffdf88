#include "knetsim/sim/kernel.hpp"

namespace knetsim::sim {

EntityId Kernel::register_entity(const std::string& name) {
  entity_names_.push_back(name);
  return static_cast<EntityId>(entity_names_.size() - 1);
}

const std::string& Kernel::entity_name(EntityId id) const {
  return entity_names_.at(id);
}

std::uint64_t Kernel::schedule(Event ev) {
  if (ev.fire_at < now_) {
    throw Error("SchedulingInPast",
                "event at tick " + std::to_string(ev.fire_at.ticks) +
                    " scheduled at tick " + std::to_string(now_.ticks));
  }
  ev.seq = next_seq_++;
  queue_.push(ev);
  return ev.seq;
}

RngStream& Kernel::entity_rng(EntityId id) {
  return rng_.stream("entity:" + entity_name(id));
}

}  // namespace knetsim::sim
