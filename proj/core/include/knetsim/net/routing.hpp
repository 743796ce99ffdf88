#pragma once

#include <functional>
#include <vector>

#include "knetsim/net/mac.hpp"
#include "knetsim/net/topology.hpp"
#include "knetsim/net/types.hpp"

namespace knetsim::net {

enum class RouteMode : std::uint8_t { ShortestLatency, KnowledgeAware };

struct RoutingWeights {
  double alpha = 1.0;  // latency term
  double beta = 1.0;   // semantic-loss term
  double gamma = 1.0;  // predicted-congestion term
  // Latency normalisation: base_latency in ticks divided by this.
  double latency_norm_ticks = 1000.0;
};

// Congestion forecast per directed link, fed from the knowledge plane.
// Returns 0 when nothing is known.
using CongestionLookup = std::function<double(EntityId src, EntityId dst)>;

struct Route {
  std::vector<EntityId> nodes;  // src ... dst
  double cost = 0.0;
};

double link_route_cost(const Link& link, const Packet& packet, RouteMode mode,
                       const RoutingWeights& weights, const ProtectionPolicy& protection,
                       const CongestionLookup& congestion);

// Minimum-cost simple path from src to dst; equal-cost ties resolve to the
// lexicographically smallest node-id sequence. Implemented as depth-first
// enumeration with cost pruning, which is exact and fast at the node counts
// this simulator runs (topologies of tens of nodes, oracle graphs of <= 8).
// Throws Error("Unreachable") when no path exists.
Route route(const Packet& packet, const Topology& topology, EntityId src, EntityId dst,
            RouteMode mode, const RoutingWeights& weights, const ProtectionPolicy& protection,
            const CongestionLookup& congestion = {});

}  // namespace knetsim::net
