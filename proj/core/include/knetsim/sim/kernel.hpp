#pragma once

#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "knetsim/common.hpp"
#include "knetsim/sim/event.hpp"
#include "knetsim/sim/rng.hpp"
#include "knetsim/sim/time.hpp"
#include "knetsim/sim/trace.hpp"

namespace knetsim::sim {

// Single-threaded discrete-event kernel: virtual clock, (fire_at, seq)
// ordered queue, named RNG streams, entity registry and dispatch trace.
//
// The kernel is a plain value. Copying it yields an independent replica of
// the full scheduling state, which is what fork() relies on: domain state
// lives in a caller-owned world object that is copied alongside.
class Kernel {
public:
  explicit Kernel(std::uint64_t seed = 0) : rng_(seed) {}

  SimTime now() const { return now_; }
  std::uint64_t seed() const { return rng_.seed(); }

  EntityId register_entity(const std::string& name);
  const std::string& entity_name(EntityId id) const;
  std::size_t entity_count() const { return entity_names_.size(); }

  // Enqueues the event and assigns its sequence number. Throws
  // Error("SchedulingInPast") if fire_at is before the current clock.
  std::uint64_t schedule(Event ev);

  // Dispatches every event with fire_at <= t through `handler`, advances the
  // clock to t, and returns the dispatch count. Handlers may schedule more
  // events, including at the current tick.
  template <typename Handler>
  std::uint64_t run_until(SimTime t, Handler&& handler) {
    if (t < now_) {
      throw Error("SchedulingInPast", "run_until target precedes current time");
    }
    std::uint64_t dispatched = 0;
    while (!queue_.empty() && queue_.top().fire_at <= t) {
      Event ev = queue_.top();
      queue_.pop();
      now_ = ev.fire_at;
      trace_.record(ev);
      ++dispatched;
      handler(ev);
    }
    now_ = t;
    return dispatched;
  }

  bool queue_empty() const { return queue_.empty(); }
  std::size_t queue_size() const { return queue_.size(); }

  RngStream& rng(const std::string& stream_id) { return rng_.stream(stream_id); }
  RngStream& entity_rng(EntityId id);

  const TraceLog& trace() const { return trace_; }

  // Independent deep copy of clock, queue, RNG streams and registry.
  Kernel fork() const { return *this; }

private:
  SimTime now_{};
  std::uint64_t next_seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  RngRegistry rng_;
  std::vector<std::string> entity_names_;
  TraceLog trace_;
};

}  // namespace knetsim::sim
