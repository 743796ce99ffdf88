#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "knetsim/common.hpp"
#include "knetsim/sim/time.hpp"

namespace knetsim::nego {

// A claim on one exclusive resource at one trajectory step.
struct Claim {
  std::string resource;
  std::uint32_t step = 0;

  auto operator<=>(const Claim&) const = default;
};

struct Proposal {
  EntityId agent = 0;
  std::vector<Claim> trajectory;  // length <= session horizon
  double claimed_utility = 0.0;
  double priority = 0.0;  // dual-weighted utility, frozen at submission
  std::uint32_t round_issued = 0;
};

struct Conflict {
  EntityId first = 0;   // lower agent id
  EntityId second = 0;  // higher agent id
  Claim claim;

  auto operator<=>(const Conflict&) const = default;
};

enum class OutcomeKind : std::uint8_t { Pending, Converged, Escalated };

struct Outcome {
  OutcomeKind kind = OutcomeKind::Pending;
  std::uint32_t rounds = 0;
};

struct RoundLog {
  std::uint32_t round = 0;
  std::size_t conflicts = 0;
  std::vector<EntityId> conceders;
};

// Produces a replacement trajectory for `agent` that avoids every excluded
// claim, or nullopt when the agent cannot avoid them (the session then falls
// back to a one-step hold if permitted).
using Replanner = std::function<std::optional<std::vector<Claim>>(
    EntityId agent, const std::set<Claim>& excluded, std::uint32_t round)>;

// Bounded iterative negotiation: per round, the lower-priority side of every
// conflict replans with the contested claims excluded; priority ties concede
// by lower agent id. Terminates by emptiness of the conflict set or by the
// round bound.
class Session {
public:
  Session(std::uint64_t id, std::uint32_t r_max, bool hold_allowed = true)
      : id_(id), r_max_(r_max), hold_allowed_(hold_allowed) {
    if (r_max < 1) throw Error("InvalidValue", "r_max must be >= 1");
  }

  std::uint64_t id() const { return id_; }
  std::uint32_t round() const { return round_; }
  std::uint32_t r_max() const { return r_max_; }
  const Outcome& outcome() const { return outcome_; }

  void submit(Proposal proposal);
  const std::map<EntityId, Proposal>& proposals() const { return proposals_; }

  // Pairwise claim intersection over current proposals, deterministic order.
  std::vector<Conflict> detect_conflicts() const;

  // One concession round. Throws Error("SessionClosed") if the outcome is
  // already set or the round bound was hit.
  RoundLog negotiate_round(const Replanner& replanner);

  // Rounds until convergence or escalation; returns the final outcome.
  Outcome run(const Replanner& replanner, std::vector<RoundLog>* log = nullptr);

  const std::map<EntityId, std::set<Claim>>& exclusions() const { return excluded_; }

private:
  std::uint64_t id_;
  std::uint32_t r_max_;
  bool hold_allowed_;
  std::uint32_t round_ = 0;
  Outcome outcome_{};
  std::map<EntityId, Proposal> proposals_;
  std::map<EntityId, std::set<Claim>> excluded_;
};

}  // namespace knetsim::nego
