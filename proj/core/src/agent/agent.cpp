#include "knetsim/agent/agent.hpp"

#include <algorithm>

namespace knetsim::agent {

std::string_view to_string(AgentLevel level) {
  switch (level) {
    case AgentLevel::Edge: return "edge";
    case AgentLevel::Infrastructure: return "infrastructure";
    case AgentLevel::Domain: return "domain";
  }
  return "unknown";
}

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::SetFlowWeight: return "set-flow-weight";
    case ActionKind::SetProtection: return "set-protection";
    case ActionKind::ChoosePath: return "choose-path";
    case ActionKind::DeclareIntention: return "declare-intention";
    case ActionKind::Yield: return "yield";
    case ActionKind::Hold: return "hold";
  }
  return "unknown";
}

bool action_permitted(AgentLevel level, const Action& action) {
  if (action.network_wide && level == AgentLevel::Edge) return false;
  return true;
}

void AgentState::validate() const {
  if (level != AgentLevel::Domain && !parent.has_value()) {
    throw Error("InvalidValue",
                std::string(to_string(level)) + " agent " + std::to_string(id) +
                    " must have a parent");
  }
}

ReasoningTrace make_trace(sim::SimTime tick, EntityId agent, const std::string& action,
                          const PlanResult& result, const std::vector<double>& duals) {
  ReasoningTrace trace;
  trace.tick = tick;
  trace.agent = agent;
  trace.action = action;
  trace.score = result.score;
  trace.active_duals = duals;
  std::vector<double> scores = result.candidate_scores;
  std::sort(scores.rbegin(), scores.rend());
  if (scores.size() > 3) scores.resize(3);  // bound trace growth
  trace.top_scores = std::move(scores);
  return trace;
}

}  // namespace knetsim::agent
