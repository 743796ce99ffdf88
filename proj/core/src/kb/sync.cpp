#include "knetsim/kb/sync.hpp"

#include <algorithm>

namespace knetsim::kb {

void SyncLayout::validate(const std::vector<EntityId>& agents) const {
  for (EntityId agent : agents) {
    std::size_t memberships = 0;
    for (const auto& cluster : clusters) {
      memberships += static_cast<std::size_t>(
          std::count(cluster.members.begin(), cluster.members.end(), agent));
    }
    if (memberships != 1) {
      throw Error("OrphanAgent", "agent " + std::to_string(agent) +
                                     " belongs to " + std::to_string(memberships) +
                                     " clusters, expected exactly 1");
    }
  }
}

Delta SyncGroup::filtered_delta(const Replica& from, std::uint64_t acked_epoch) const {
  Delta delta = from.compute_delta(acked_epoch, policy_);
  auto synced = [&](ObjectKind kind) {
    return std::find(synced_kinds_.begin(), synced_kinds_.end(), kind) !=
           synced_kinds_.end();
  };
  std::erase_if(delta.upserts, [&](const KnowledgeObject& o) { return !synced(o.kind); });
  std::erase_if(delta.expirations, [&](const DeltaExpiration& e) { return !synced(e.kind); });
  return delta;
}

bool SyncGroup::send(Replica& from, Replica& to, sim::SimTime now, SyncReport& report) {
  const auto key = std::make_pair(from.owner(), to.owner());
  const std::uint64_t acked = acked_[key];
  Delta delta = filtered_delta(from, acked);
  acked_[key] = from.epoch();
  // Never tell a peer about its own objects; the author is authoritative.
  std::erase_if(delta.upserts,
                [&](const KnowledgeObject& o) { return o.origin == to.owner(); });
  if (delta.empty()) return false;
  auto statuses = to.apply_delta(delta, now);
  report.messages += 1;
  report.objects += delta.upserts.size() + delta.expirations.size();
  if (observer_) observer_(from.owner(), to.owner(), delta, statuses);
  return true;
}

SyncReport SyncGroup::sync_round(std::map<EntityId, Replica>& replicas,
                                 const SyncLayout& layout, SyncMode mode,
                                 sim::SimTime now) {
  std::vector<EntityId> agents;
  for (const auto& cluster : layout.clusters) {
    agents.insert(agents.end(), cluster.members.begin(), cluster.members.end());
  }
  layout.validate(agents);

  SyncReport report;
  if (mode == SyncMode::Flat) {
    for (EntityId src : agents) {
      for (EntityId dst : agents) {
        if (src == dst) continue;
        send(replicas.at(src), replicas.at(dst), now, report);
      }
    }
    return report;
  }

  const bool multi_cluster = layout.clusters.size() > 1;
  // Members up to their head.
  for (const auto& cluster : layout.clusters) {
    for (EntityId member : cluster.members) {
      send(replicas.at(member), replicas.at(cluster.head), now, report);
    }
  }
  // Heads up to the root and back down.
  if (multi_cluster) {
    for (const auto& cluster : layout.clusters) {
      send(replicas.at(cluster.head), replicas.at(layout.root), now, report);
    }
    for (const auto& cluster : layout.clusters) {
      send(replicas.at(layout.root), replicas.at(cluster.head), now, report);
    }
  }
  // Heads down to members.
  for (const auto& cluster : layout.clusters) {
    for (EntityId member : cluster.members) {
      send(replicas.at(cluster.head), replicas.at(member), now, report);
    }
  }
  return report;
}

}  // namespace knetsim::kb
