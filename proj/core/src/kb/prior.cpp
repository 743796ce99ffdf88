#include "knetsim/kb/prior.hpp"

namespace knetsim::kb {

void PriorModel::observe(const std::string& context, const std::string& outcome) {
  ++live_[context][outcome];
  ++observations_;
}

void PriorModel::refresh(sim::SimTime now) {
  snapshot_ = live_;
  last_refresh_ = now;
}

std::optional<PriorPrediction> PriorModel::predict(const std::string& context) const {
  auto it = snapshot_.find(context);
  if (it == snapshot_.end() || it->second.empty()) return std::nullopt;
  std::uint64_t total = 0;
  const std::string* best = nullptr;
  std::uint64_t best_count = 0;
  for (const auto& [outcome, count] : it->second) {
    total += count;
    if (count > best_count) {  // map order makes equal counts resolve to the
      best = &outcome;         // lexicographically first outcome
      best_count = count;
    }
  }
  return PriorPrediction{*best, static_cast<double>(best_count) / static_cast<double>(total)};
}

bool fast_path_sufficient(const Replica& replica, EntityId subject, ObjectKind kind,
                          sim::SimTime now, double tau_slow) {
  auto obj = replica.query_fast(subject, kind, now);
  return obj.has_value() && obj->confidence >= tau_slow;
}

Payload prediction_payload(const Payload& templ, const std::string& outcome) {
  Payload p = templ;
  p.tag = outcome;
  return p;
}

std::vector<KnowledgeObject> query_prior(Replica& replica, const PriorModel& prior,
                                         const std::string& context, EntityId subject,
                                         const Payload& outcome_payload_template,
                                         sim::SimTime now, const PriorQueryConfig& cfg,
                                         std::uint64_t object_id, std::uint64_t version) {
  auto prediction = prior.predict(context);
  if (!prediction) return {};

  KnowledgeObject obj = make_object(
      object_id, ObjectKind::ModelSummary, subject,
      prediction_payload(outcome_payload_template, prediction->outcome),
      prediction->confidence, now, now + cfg.prediction_validity.ticks,
      kPriorModelAuthor, version);

  // Grounding: a prediction that contradicts live observed state is noise,
  // not knowledge. Reject and keep the record for retraining analysis.
  auto fact = replica.query_fast(subject, ObjectKind::Fact, now);
  if (fact.has_value()) {
    const double distance = payload_distance(fact->payload, obj.payload);
    if (distance > cfg.delta_ground) {
      replica.log_rejection(now, subject, ObjectKind::ModelSummary, "prior-contradicts-fact");
      return {};
    }
  }
  return {obj};
}

}  // namespace knetsim::kb
