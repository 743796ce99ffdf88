#include "knetsim/net/topology.hpp"

namespace knetsim::net {

std::string_view to_string(NodeLevel level) {
  switch (level) {
    case NodeLevel::UserEquipment: return "user-equipment";
    case NodeLevel::Edge: return "edge";
    case NodeLevel::BaseStation: return "base-station";
    case NodeLevel::Regional: return "regional";
  }
  return "unknown";
}

std::string_view to_string(ProtectionTier tier) {
  switch (tier) {
    case ProtectionTier::Light: return "light";
    case ProtectionTier::Standard: return "standard";
    case ProtectionTier::Strong: return "strong";
  }
  return "unknown";
}

void Topology::add_node(Node node) {
  nodes_[node.id] = node;
}

void Topology::add_link(Link link) {
  if (link.capacity_bits_per_frame == 0) {
    throw Error("InvalidValue", "link capacity must be positive");
  }
  if (link.base_loss < 0.0 || link.base_loss >= 1.0) {
    throw Error("InvalidValue", "link base_loss must be in [0, 1)");
  }
  links_.push_back(link);
}

const Node& Topology::node(EntityId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw Error("UnknownEntity", "node " + std::to_string(id) + " not in topology");
  }
  return it->second;
}

const Link* Topology::find_link(EntityId src, EntityId dst) const {
  for (const auto& l : links_) {
    if (l.src == src && l.dst == dst) return &l;
  }
  return nullptr;
}

std::vector<const Link*> Topology::out_links(EntityId src) const {
  std::vector<const Link*> out;
  for (const auto& l : links_) {
    if (l.src == src) out.push_back(&l);
  }
  return out;
}

}  // namespace knetsim::net
