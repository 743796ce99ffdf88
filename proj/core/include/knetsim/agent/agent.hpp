#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "knetsim/agent/planner.hpp"
#include "knetsim/agent/world_model.hpp"
#include "knetsim/kb/intent.hpp"
#include "knetsim/kb/replica.hpp"
#include "knetsim/sim/time.hpp"

namespace knetsim::agent {

enum class AgentLevel : std::uint8_t { Edge, Infrastructure, Domain };

std::string_view to_string(AgentLevel level);

enum class ActionKind : std::uint8_t {
  SetFlowWeight,
  SetProtection,
  ChoosePath,
  DeclareIntention,
  Yield,
  Hold,
};

std::string_view to_string(ActionKind kind);

struct Action {
  ActionKind kind = ActionKind::Hold;
  EntityId issuer = 0;
  sim::SimTime issued_at{};
  // Parameters; interpretation is scenario-specific.
  std::vector<double> params;
  std::string label;
  bool network_wide = false;  // policy scope; reserved to non-edge levels
};

// Action kinds an agent at `level` may issue. Edge agents act locally only;
// network-wide policies belong to infrastructure and domain levels.
bool action_permitted(AgentLevel level, const Action& action);

// Agent state: hierarchy position, local knowledge replica, world model and
// bounded transition memory, plus the intents currently in force.
struct AgentState {
  EntityId id = 0;
  AgentLevel level = AgentLevel::Edge;
  std::optional<EntityId> parent;  // absent for domain agents
  kb::Replica replica;
  WorldModel model;
  std::vector<kb::IntentDescriptor> intents;

  void validate() const;
};

// Reasoning trace entry recorded on every act: chosen action, top candidate
// scores and the duals that were in force.
struct ReasoningTrace {
  sim::SimTime tick{};
  EntityId agent = 0;
  std::string action;
  double score = 0.0;
  std::vector<double> active_duals;
  std::vector<double> top_scores;  // at most 3, descending
};

ReasoningTrace make_trace(sim::SimTime tick, EntityId agent, const std::string& action,
                          const PlanResult& result, const std::vector<double>& duals);

}  // namespace knetsim::agent
