#pragma once

#include <map>
#include <optional>
#include <vector>

#include "knetsim/net/types.hpp"

namespace knetsim::net {

class Topology {
public:
  void add_node(Node node);
  void add_link(Link link);

  const Node& node(EntityId id) const;
  bool has_node(EntityId id) const { return nodes_.count(id) != 0; }
  const std::map<EntityId, Node>& nodes() const { return nodes_; }

  // Links are directed; id order is deterministic (insertion order).
  const std::vector<Link>& links() const { return links_; }
  const Link* find_link(EntityId src, EntityId dst) const;

  std::vector<const Link*> out_links(EntityId src) const;

private:
  std::map<EntityId, Node> nodes_;
  std::vector<Link> links_;
};

}  // namespace knetsim::net
