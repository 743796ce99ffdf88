#include "knetsim/net/routing.hpp"

#include <algorithm>

#include "knetsim/net/mac.hpp"

namespace knetsim::net {

double link_route_cost(const Link& link, const Packet& packet, RouteMode mode,
                       const RoutingWeights& weights, const ProtectionPolicy& protection,
                       const CongestionLookup& congestion) {
  const double latency_norm =
      static_cast<double>(link.base_latency.ticks) / weights.latency_norm_ticks;
  if (mode == RouteMode::ShortestLatency) {
    return static_cast<double>(link.base_latency.ticks);
  }
  const ProtectionLevel level = select_protection(packet, protection);
  const double survival = 1.0 - effective_loss(link, level);
  const double predicted = congestion ? congestion(link.src, link.dst) : 0.0;
  return weights.alpha * latency_norm +
         weights.beta * (1.0 - survival) * packet.contribution_score +
         weights.gamma * predicted;
}

namespace {

struct Search {
  const Topology& topo;
  const Packet& packet;
  RouteMode mode;
  const RoutingWeights& weights;
  const ProtectionPolicy& protection;
  const CongestionLookup& congestion;
  EntityId dst;

  std::vector<EntityId> current;
  Route best;
  bool found = false;

  bool visited(EntityId id) const {
    return std::find(current.begin(), current.end(), id) != current.end();
  }

  void extend(EntityId node, double cost) {
    if (found && cost > best.cost) return;  // prune: costs are non-negative
    current.push_back(node);
    if (node == dst) {
      const bool better =
          !found || cost < best.cost || (cost == best.cost && current < best.nodes);
      if (better) {
        best.nodes = current;
        best.cost = cost;
        found = true;
      }
      current.pop_back();
      return;
    }
    // Deterministic neighbour order: ascending destination id.
    auto links = topo.out_links(node);
    std::sort(links.begin(), links.end(),
              [](const Link* a, const Link* b) { return a->dst < b->dst; });
    for (const Link* l : links) {
      if (visited(l->dst)) continue;
      const double c =
          link_route_cost(*l, packet, mode, weights, protection, congestion);
      extend(l->dst, cost + c);
    }
    current.pop_back();
  }
};

}  // namespace

Route route(const Packet& packet, const Topology& topology, EntityId src, EntityId dst,
            RouteMode mode, const RoutingWeights& weights, const ProtectionPolicy& protection,
            const CongestionLookup& congestion) {
  if (!topology.has_node(src) || !topology.has_node(dst)) {
    throw Error("Unreachable", "route endpoints missing from topology");
  }
  if (src == dst) {
    return Route{{src}, 0.0};
  }
  Search search{topology, packet, mode, weights, protection, congestion, dst, {}, {}, false};
  search.extend(src, 0.0);
  if (!search.found) {
    throw Error("Unreachable", "no path from " + std::to_string(src) + " to " +
                                   std::to_string(dst));
  }
  return search.best;
}

}  // namespace knetsim::net
