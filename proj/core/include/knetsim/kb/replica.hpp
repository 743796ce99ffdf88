#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "knetsim/kb/object.hpp"

namespace knetsim::kb {

enum class UpsertStatus : std::uint8_t { Accepted, Superseded, Rejected };

struct UpsertResult {
  UpsertStatus status = UpsertStatus::Rejected;
  std::string reason;  // set when rejected: InvalidProvenance, MalformedValidity, ...

  bool accepted() const { return status == UpsertStatus::Accepted; }
};

struct Relation {
  EntityId subject = 0;
  std::string label;
  EntityId object = 0;
  sim::SimTime valid_from{};
  sim::SimTime valid_until{};
};

// Per-kind payload divergence threshold below which changes are not worth
// propagating. Facts default to 0 (always propagate).
struct DeltaPolicy {
  double threshold(ObjectKind kind) const {
    switch (kind) {
      case ObjectKind::ModelSummary: return model_summary;
      default: return fact;
    }
  }
  double fact = 0.0;
  double model_summary = 0.1;
};

struct DeltaExpiration {
  EntityId subject = 0;
  ObjectKind kind = ObjectKind::Fact;
  std::uint64_t version = 0;
};

struct Delta {
  std::uint64_t from_epoch = 0;
  std::uint64_t to_epoch = 0;
  std::vector<KnowledgeObject> upserts;
  std::vector<DeltaExpiration> expirations;

  bool empty() const { return upserts.empty() && expirations.empty(); }
  std::uint64_t payload_bits(std::uint64_t bits_per_object) const {
    return bits_per_object * (upserts.size() + expirations.size());
  }
};

struct RejectionRecord {
  sim::SimTime tick{};
  EntityId subject = 0;
  ObjectKind kind = ObjectKind::Fact;
  std::string reason;
};

// One agent's replica of the shared knowledge graph: current object per
// (subject, kind), bounded history, typed relations, an epoch journal for
// delta computation, and the rejection log.
class Replica {
public:
  using Key = std::pair<EntityId, ObjectKind>;

  explicit Replica(EntityId owner = 0) : owner_(owner) {}

  EntityId owner() const { return owner_; }
  std::uint64_t epoch() const { return epoch_; }

  // Conflict resolution, in order: a valid object beats an expired one, then
  // higher confidence, then later valid_from, then higher origin id. The
  // losing side goes to history. Stale versions from an origin that already
  // produced a newer one are rejected outright (replay defense).
  UpsertResult upsert(KnowledgeObject object, sim::SimTime now);

  std::optional<KnowledgeObject> query_fast(EntityId subject, ObjectKind kind,
                                            sim::SimTime now) const;

  // Moves every current object whose validity has lapsed to history.
  std::size_t expire(sim::SimTime now);

  // Changes journaled after peer_epoch whose payload diverges from the
  // peer-acknowledged value by at least the per-kind threshold (or whose
  // validity changed). Expirations are always included.
  // Throws Error("UnknownEpoch") when peer_epoch predates the retained
  // journal window.
  Delta compute_delta(std::uint64_t peer_epoch, const DeltaPolicy& policy) const;

  // Merges a peer delta through the regular upsert path; returns the upsert
  // status of every carried object, in delta order.
  std::vector<UpsertStatus> apply_delta(const Delta& delta, sim::SimTime now);

  bool dirty_since(std::uint64_t peer_epoch) const { return epoch_ > peer_epoch; }

  void add_relation(Relation relation);
  const std::vector<Relation>& relations() const { return relations_; }

  const std::vector<RejectionRecord>& rejections() const { return rejections_; }
  void log_rejection(sim::SimTime tick, EntityId subject, ObjectKind kind,
                     std::string reason);

  const std::map<Key, KnowledgeObject>& current() const { return current_; }
  const std::vector<KnowledgeObject>& history() const { return history_; }

  // Deterministic structured dump (entities, current objects, all fields)
  // used by tests and the snapshot artifact.
  std::string export_snapshot() const;

  // Equality of current maps restricted to the given kinds; the replica
  // convergence check.
  static bool same_current(const Replica& a, const Replica& b,
                           const std::vector<ObjectKind>& kinds);

  void set_history_limit(std::size_t limit) { history_limit_ = limit; }

  // Drops journal entries older than the last `keep_last` ones; deltas
  // against epochs before the trimmed window raise UnknownEpoch.
  void trim_journal(std::size_t keep_last);

private:
  struct JournalEntry {
    std::uint64_t epoch = 0;
    Key key;
    bool expiration = false;
    KnowledgeObject object;  // state after the change (or the expired object)
  };

  void journal_change(const Key& key, const KnowledgeObject& object, bool expiration);
  void push_history(KnowledgeObject object);

  EntityId owner_ = 0;
  std::uint64_t epoch_ = 0;
  std::map<Key, KnowledgeObject> current_;
  std::map<std::tuple<EntityId, ObjectKind, EntityId>, std::uint64_t> high_water_;
  std::vector<KnowledgeObject> history_;
  std::size_t history_limit_ = 256;
  std::vector<JournalEntry> journal_;
  std::uint64_t journal_start_epoch_ = 0;
  std::vector<Relation> relations_;
  std::vector<RejectionRecord> rejections_;
};

}  // namespace knetsim::kb
