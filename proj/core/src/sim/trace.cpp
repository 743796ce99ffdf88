#include "knetsim/sim/trace.hpp"

namespace knetsim::sim {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::PacketArrival: return "packet-arrival";
    case EventKind::AgentTick: return "agent-tick";
    case EventKind::SyncTrigger: return "sync-trigger";
    case EventKind::NegotiationRound: return "negotiation-round";
    case EventKind::MetricSample: return "metric-sample";
  }
  return "unknown";
}

void TraceLog::record(const Event& ev) {
  entries_.push_back(ev);
}

std::string TraceLog::render() const {
  std::string out;
  out.reserve(entries_.size() * 32);
  for (const auto& ev : entries_) {
    out += std::to_string(ev.fire_at.ticks);
    out += ',';
    out += std::to_string(ev.seq);
    out += ',';
    out += std::to_string(ev.target);
    out += ',';
    out += to_string(ev.kind);
    out += '\n';
  }
  return out;
}

std::uint64_t TraceLog::hash() const {
  std::uint64_t h = kFnvOffset;
  for (const auto& ev : entries_) {
    h = fnv1a(h, ev.fire_at.ticks);
    h = fnv1a(h, ev.seq);
    h = fnv1a(h, static_cast<std::uint64_t>(ev.target));
    h = fnv1a(h, static_cast<std::uint64_t>(ev.kind));
  }
  return h;
}

}  // namespace knetsim::sim
