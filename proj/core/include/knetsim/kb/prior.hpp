#pragma once

#include <map>
#include <optional>
#include <string>

#include "knetsim/kb/replica.hpp"

namespace knetsim::kb {

// Pseudo-entity credited as author/origin of prior-model outputs.
inline constexpr EntityId kPriorModelAuthor = 0xFFFFFFFE;

struct PriorPrediction {
  std::string outcome;
  double confidence = 0.0;  // empirical frequency of the outcome
};

// Frequency-table prior over discretised (context -> outcome) pairs. Stands
// in for a statistical prior learned offline: observations accumulate live,
// but predictions are served from the last refreshed snapshot, so the prior
// is deliberately stale between refreshes.
class PriorModel {
public:
  void observe(const std::string& context, const std::string& outcome);

  // Swaps the serving snapshot for the accumulated counts.
  void refresh(sim::SimTime now);
  sim::SimTime last_refresh() const { return last_refresh_; }

  std::optional<PriorPrediction> predict(const std::string& context) const;

  std::uint64_t observation_count() const { return observations_; }

private:
  using Table = std::map<std::string, std::map<std::string, std::uint64_t>>;
  Table live_;
  Table snapshot_;
  std::uint64_t observations_ = 0;
  sim::SimTime last_refresh_{};
};

// Fast path first: the slow path is warranted only when the graph has no
// valid answer or its confidence is below tau_slow.
bool fast_path_sufficient(const Replica& replica, EntityId subject, ObjectKind kind,
                          sim::SimTime now, double tau_slow);

struct PriorQueryConfig {
  double delta_ground = 0.5;  // max payload distance to a current fact
  sim::SimTime prediction_validity{10000};
};

// Wraps a prior prediction as a model-summary knowledge object credited to
// the prior model, then grounds it against the current fact on the same
// subject: contradictions are discarded and recorded in the replica's
// rejection log. Returns only grounded outputs.
std::vector<KnowledgeObject> query_prior(Replica& replica, const PriorModel& prior,
                                         const std::string& context, EntityId subject,
                                         const Payload& outcome_payload_template,
                                         sim::SimTime now, const PriorQueryConfig& cfg,
                                         std::uint64_t object_id, std::uint64_t version);

// Builds the payload a prediction would carry; exposed for scenarios that
// need to interpret predictions symmetrically on both ends of a link.
Payload prediction_payload(const Payload& templ, const std::string& outcome);

}  // namespace knetsim::kb
