#include "knetsim/nego/session.hpp"

#include <algorithm>

namespace knetsim::nego {

void Session::submit(Proposal proposal) {
  if (outcome_.kind != OutcomeKind::Pending) {
    throw Error("SessionClosed", "proposal after session outcome was set");
  }
  proposals_[proposal.agent] = std::move(proposal);
}

std::vector<Conflict> Session::detect_conflicts() const {
  std::vector<Conflict> conflicts;
  for (auto a = proposals_.begin(); a != proposals_.end(); ++a) {
    auto b = a;
    for (++b; b != proposals_.end(); ++b) {
      for (const Claim& ca : a->second.trajectory) {
        for (const Claim& cb : b->second.trajectory) {
          if (ca == cb) {
            conflicts.push_back({a->first, b->first, ca});
          }
        }
      }
    }
  }
  std::sort(conflicts.begin(), conflicts.end());
  return conflicts;
}

RoundLog Session::negotiate_round(const Replanner& replanner) {
  if (outcome_.kind != OutcomeKind::Pending || round_ >= r_max_) {
    throw Error("SessionClosed", "negotiate_round on a closed session");
  }
  const auto conflicts = detect_conflicts();
  RoundLog log;
  log.round = round_ + 1;
  log.conflicts = conflicts.size();

  // Collect the contested claims each losing agent must avoid. An agent
  // concedes at most once per round even when it sits in several conflicts.
  std::set<EntityId> conceders;
  for (const auto& conflict : conflicts) {
    const Proposal& pa = proposals_.at(conflict.first);
    const Proposal& pb = proposals_.at(conflict.second);
    EntityId loser;
    if (pa.priority != pb.priority) {
      loser = pa.priority < pb.priority ? conflict.first : conflict.second;
    } else {
      loser = conflict.first;  // tie: lower agent id concedes
    }
    excluded_[loser].insert(conflict.claim);
    conceders.insert(loser);
  }

  ++round_;
  for (EntityId agent : conceders) {
    log.conceders.push_back(agent);
    auto replacement = replanner(agent, excluded_[agent], round_);
    Proposal& proposal = proposals_.at(agent);
    if (replacement.has_value()) {
      proposal.trajectory = std::move(*replacement);
      proposal.round_issued = round_;
    } else if (hold_allowed_) {
      // Delay by one step; previously cleared earlier steps stay cleared.
      for (Claim& c : proposal.trajectory) c.step += 1;
      proposal.round_issued = round_;
    }
    // Otherwise the agent cannot move at all; the conflict persists and the
    // session will escalate at the round bound.
  }
  return log;
}

Outcome Session::run(const Replanner& replanner, std::vector<RoundLog>* log) {
  if (outcome_.kind != OutcomeKind::Pending) {
    throw Error("SessionClosed", "run on a closed session");
  }
  while (true) {
    if (detect_conflicts().empty()) {
      outcome_ = {OutcomeKind::Converged, round_};
      return outcome_;
    }
    if (round_ >= r_max_) {
      outcome_ = {OutcomeKind::Escalated, round_};
      return outcome_;
    }
    RoundLog entry = negotiate_round(replanner);
    if (log != nullptr) log->push_back(std::move(entry));
  }
}

}  // namespace knetsim::nego
