#include "knetsim/kb/replica.hpp"

#include <algorithm>
#include <sstream>

namespace knetsim::kb {

namespace {

// Strict total order between two objects competing for the same (subject,
// kind) slot, evaluated at `now`. Returns true when `incoming` wins.
bool incoming_wins(const KnowledgeObject& incoming, const KnowledgeObject& incumbent,
                   sim::SimTime now) {
  const bool in_valid = incoming.valid_at(now);
  const bool cur_valid = incumbent.valid_at(now);
  if (in_valid != cur_valid) return in_valid;
  if (incoming.confidence != incumbent.confidence) {
    return incoming.confidence > incumbent.confidence;
  }
  if (incoming.valid_from != incumbent.valid_from) {
    return incoming.valid_from > incumbent.valid_from;
  }
  return incoming.origin > incumbent.origin;
}

}  // namespace

UpsertResult Replica::upsert(KnowledgeObject object, sim::SimTime now) {
  if (!verify_provenance(object)) {
    log_rejection(now, object.subject, object.kind, "InvalidProvenance");
    return {UpsertStatus::Rejected, "InvalidProvenance"};
  }
  if (object.valid_from >= object.valid_until) {
    log_rejection(now, object.subject, object.kind, "MalformedValidity");
    return {UpsertStatus::Rejected, "MalformedValidity"};
  }
  if (object.valid_until <= now) {
    // Replayed or long-dead object; never admitted as current.
    log_rejection(now, object.subject, object.kind, "Expired");
    return {UpsertStatus::Rejected, "Expired"};
  }
  const auto hw_key = std::make_tuple(object.subject, object.kind, object.origin);
  auto hw = high_water_.find(hw_key);
  if (hw != high_water_.end() && object.version <= hw->second) {
    // Redelivery of the exact current state (same version, same content) is
    // a quiet no-op; anything else claiming an old version is a replay.
    auto cur = current_.find({object.subject, object.kind});
    const bool echo = object.version == hw->second && cur != current_.end() &&
                      cur->second.origin == object.origin &&
                      payload_digest(cur->second.payload) == payload_digest(object.payload);
    if (echo) return {UpsertStatus::Superseded, ""};
    log_rejection(now, object.subject, object.kind, "StaleVersion");
    return {UpsertStatus::Rejected, "StaleVersion"};
  }
  high_water_[hw_key] = object.version;

  const Key key{object.subject, object.kind};
  auto it = current_.find(key);
  if (it == current_.end()) {
    journal_change(key, object, false);
    current_.emplace(key, std::move(object));
    return {UpsertStatus::Accepted, ""};
  }
  if (incoming_wins(object, it->second, now)) {
    push_history(std::move(it->second));
    it->second = object;
    journal_change(key, object, false);
    return {UpsertStatus::Accepted, ""};
  }
  push_history(std::move(object));
  return {UpsertStatus::Superseded, ""};
}

std::optional<KnowledgeObject> Replica::query_fast(EntityId subject, ObjectKind kind,
                                                   sim::SimTime now) const {
  auto it = current_.find({subject, kind});
  if (it == current_.end()) return std::nullopt;
  if (!it->second.valid_at(now)) return std::nullopt;
  return it->second;
}

std::size_t Replica::expire(sim::SimTime now) {
  std::size_t count = 0;
  for (auto it = current_.begin(); it != current_.end();) {
    if (it->second.valid_until <= now) {
      journal_change(it->first, it->second, true);
      push_history(std::move(it->second));
      it = current_.erase(it);
      ++count;
    } else {
      ++it;
    }
  }
  return count;
}

Delta Replica::compute_delta(std::uint64_t peer_epoch, const DeltaPolicy& policy) const {
  if (peer_epoch < journal_start_epoch_) {
    throw Error("UnknownEpoch",
                "epoch " + std::to_string(peer_epoch) + " is outside the journal window");
  }
  if (peer_epoch > epoch_) {
    throw Error("UnknownEpoch", "peer epoch is ahead of local epoch");
  }

  // Peer-acknowledged payload per key: the last journaled state at or before
  // peer_epoch.
  std::map<Key, const KnowledgeObject*> acked;
  for (const auto& entry : journal_) {
    if (entry.epoch > peer_epoch) break;
    acked[entry.key] = entry.expiration ? nullptr : &entry.object;
  }

  Delta delta;
  delta.from_epoch = peer_epoch;
  delta.to_epoch = epoch_;

  std::map<Key, bool> expired_after;  // key -> any expiration after peer_epoch
  std::map<Key, bool> changed_after;
  for (const auto& entry : journal_) {
    if (entry.epoch <= peer_epoch) continue;
    if (entry.expiration) {
      expired_after[entry.key] = true;
    } else {
      changed_after[entry.key] = true;
    }
  }

  for (const auto& [key, expired] : expired_after) {
    if (!expired) continue;
    auto cur = current_.find(key);
    if (cur != current_.end()) continue;  // re-upserted since; covered below
    // Report the latest expired version so the peer can drop its copy.
    std::uint64_t version = 0;
    for (auto it = journal_.rbegin(); it != journal_.rend(); ++it) {
      if (it->key == key && it->expiration) {
        version = it->object.version;
        break;
      }
    }
    delta.expirations.push_back({key.first, key.second, version});
  }

  for (const auto& [key, _] : changed_after) {
    auto cur = current_.find(key);
    if (cur == current_.end()) continue;  // expired again; handled above
    const KnowledgeObject& obj = cur->second;
    const auto acked_it = acked.find(key);
    const KnowledgeObject* base =
        acked_it == acked.end() ? nullptr : acked_it->second;
    bool include = true;  // no baseline retained: propagate conservatively
    if (base != nullptr) {
      const bool validity_changed = base->valid_from != obj.valid_from ||
                                    base->valid_until != obj.valid_until;
      const double divergence = payload_distance(base->payload, obj.payload);
      include = validity_changed || divergence >= policy.threshold(obj.kind);
    }
    if (include) delta.upserts.push_back(obj);
  }
  return delta;
}

std::vector<UpsertStatus> Replica::apply_delta(const Delta& delta, sim::SimTime now) {
  std::vector<UpsertStatus> statuses;
  statuses.reserve(delta.upserts.size());
  for (const auto& obj : delta.upserts) {
    statuses.push_back(upsert(obj, now).status);
  }
  for (const auto& exp : delta.expirations) {
    auto it = current_.find({exp.subject, exp.kind});
    if (it != current_.end() && it->second.version <= exp.version) {
      journal_change(it->first, it->second, true);
      push_history(std::move(it->second));
      current_.erase(it);
    }
  }
  return statuses;
}

void Replica::add_relation(Relation relation) {
  relations_.push_back(std::move(relation));
}

void Replica::log_rejection(sim::SimTime tick, EntityId subject, ObjectKind kind,
                            std::string reason) {
  rejections_.push_back({tick, subject, kind, std::move(reason)});
}

void Replica::journal_change(const Key& key, const KnowledgeObject& object,
                             bool expiration) {
  ++epoch_;
  journal_.push_back({epoch_, key, expiration, object});
}

void Replica::trim_journal(std::size_t keep_last) {
  if (journal_.size() <= keep_last) return;
  const std::size_t drop = journal_.size() - keep_last;
  journal_start_epoch_ = journal_[drop - 1].epoch;
  journal_.erase(journal_.begin(), journal_.begin() + drop);
}

void Replica::push_history(KnowledgeObject object) {
  history_.push_back(std::move(object));
  if (history_.size() > history_limit_) {
    history_.erase(history_.begin(), history_.begin() + (history_.size() - history_limit_));
  }
}

std::string Replica::export_snapshot() const {
  std::ostringstream out;
  out << "replica " << owner_ << " epoch " << epoch_ << "\n";
  for (const auto& [key, obj] : current_) {
    out << "  subject=" << key.first << " kind=" << to_string(key.second)
        << " origin=" << obj.origin << " version=" << obj.version
        << " confidence=" << format_double(obj.confidence)
        << " valid=[" << obj.valid_from.ticks << "," << obj.valid_until.ticks << ")"
        << " tag=" << obj.payload.tag << " values=[";
    for (std::size_t i = 0; i < obj.payload.values.size(); ++i) {
      if (i) out << " ";
      out << format_double(obj.payload.values[i]);
    }
    out << "]\n";
  }
  return out.str();
}

bool Replica::same_current(const Replica& a, const Replica& b,
                           const std::vector<ObjectKind>& kinds) {
  auto filter = [&](const Replica& r) {
    std::map<Key, std::tuple<std::uint64_t, EntityId, std::uint64_t>> view;
    for (const auto& [key, obj] : r.current_) {
      if (std::find(kinds.begin(), kinds.end(), key.second) == kinds.end()) continue;
      view[key] = {payload_digest(obj.payload), obj.origin, obj.version};
    }
    return view;
  };
  return filter(a) == filter(b);
}

}  // namespace knetsim::kb
