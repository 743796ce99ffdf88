#pragma once

#include <functional>
#include <map>
#include <vector>

#include "knetsim/kb/replica.hpp"

namespace knetsim::kb {

enum class SyncMode : std::uint8_t { Flat, Hierarchical };

// Agents grouped into clusters of size k << N, each with a parent aggregator
// that also holds a replica. With more than one cluster a root aggregator
// bridges the heads.
struct Cluster {
  EntityId head = 0;
  std::vector<EntityId> members;
};

struct SyncLayout {
  std::vector<Cluster> clusters;
  EntityId root = 0;  // used when clusters.size() > 1

  // Throws Error("OrphanAgent") if any of `agents` is missing from every
  // cluster or listed twice.
  void validate(const std::vector<EntityId>& agents) const;
};

struct SyncReport {
  std::uint64_t messages = 0;  // directed, non-empty deltas only
  std::uint64_t objects = 0;   // upserts + expirations carried
};

// Called once per delivered delta with the receiver's per-object upsert
// statuses; scenarios hang bit accounting off this.
using MessageObserver = std::function<void(EntityId src, EntityId dst, const Delta& delta,
                                           const std::vector<UpsertStatus>& statuses)>;

// One synchronization round over the given replicas. Flat mode exchanges
// pairwise deltas (N(N-1) directed messages when everyone is dirty);
// hierarchical mode funnels member deltas through cluster heads and, with
// multiple clusters, through the root. Both leave every replica with the
// same current objects for the synced kinds.
class SyncGroup {
public:
  SyncGroup(DeltaPolicy policy, std::vector<ObjectKind> synced_kinds)
      : policy_(policy), synced_kinds_(std::move(synced_kinds)) {}

  SyncReport sync_round(std::map<EntityId, Replica>& replicas, const SyncLayout& layout,
                        SyncMode mode, sim::SimTime now);

  void set_observer(MessageObserver observer) { observer_ = std::move(observer); }

  const std::vector<ObjectKind>& synced_kinds() const { return synced_kinds_; }

private:
  Delta filtered_delta(const Replica& from, std::uint64_t acked_epoch) const;
  // Sends from -> to if the filtered delta is non-empty; updates the acked
  // epoch either way (an empty delta means the peer is already caught up).
  bool send(Replica& from, Replica& to, sim::SimTime now, SyncReport& report);

  DeltaPolicy policy_;
  std::vector<ObjectKind> synced_kinds_;
  MessageObserver observer_;
  // acked[(src, dst)]: src's epoch as of the last delta dst applied.
  std::map<std::pair<EntityId, EntityId>, std::uint64_t> acked_;
};

}  // namespace knetsim::kb
