#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "knetsim/sim/event.hpp"

namespace knetsim::sim {

// Record of every dispatched event, in dispatch order. The rendered form
// (`tick,seq,target,kind`, one line per event) is the determinism test
// surface: two runs are equivalent iff their rendered traces are identical.
class TraceLog {
public:
  void record(const Event& ev);

  std::size_t size() const { return entries_.size(); }
  const std::vector<Event>& entries() const { return entries_; }

  std::string render() const;
  std::uint64_t hash() const;

private:
  std::vector<Event> entries_;
};

}  // namespace knetsim::sim
