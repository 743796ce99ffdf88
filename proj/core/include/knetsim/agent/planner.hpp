#pragma once

#include <functional>
#include <string>
#include <vector>

#include "knetsim/agent/world_model.hpp"
#include "knetsim/sim/rng.hpp"

namespace knetsim::agent {

// Per-step constraint signal: metric_fn(state, action) is compared against
// the bound and priced by the dual variable inside the rollout score.
struct PlanConstraint {
  std::string metric;
  double lambda = 0.0;
  double bound = 0.0;
  std::function<double(const std::string&, const std::string&)> metric_fn;
};

struct PlannerConfig {
  double gamma = 0.95;
  std::uint32_t horizon = 3;    // H >= 1
  std::uint32_t rollouts = 32;  // K >= 1, sampled mode only
  bool exact = false;           // exact enumeration instead of sampling
};

struct PlanResult {
  std::size_t candidate_index = 0;
  std::string action;
  double score = 0.0;
  std::vector<double> candidate_scores;  // declaration order
};

// Score of one action from one state, horizon H: discounted sum of stage
// utilities, where each stage pays the Lagrangian penalty for constraint
// violations. Exact mode computes the expectimax value over the model's
// transition distribution (later steps maximise over `actions`); sampled
// mode averages K rollouts that follow a myopic base policy after the first
// step, drawing transitions from the supplied planning stream.
double score_action(const WorldModel& model, const std::string& state,
                    const std::string& first_action,
                    const std::vector<std::string>& actions,
                    const std::vector<PlanConstraint>& constraints,
                    const PlannerConfig& cfg, sim::RngStream* rng);

// Argmax of score_action over `candidates`; ties resolve to the earliest
// declared candidate. Throws Error("EmptyCandidates") when there is nothing
// to choose from.
PlanResult plan(const WorldModel& model, const std::string& state,
                const std::vector<std::string>& actions,
                const std::vector<std::string>& candidates,
                const std::vector<PlanConstraint>& constraints, const PlannerConfig& cfg,
                sim::RngStream* rng);

}  // namespace knetsim::agent
