#include "knetsim/agent/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace knetsim::agent {

namespace {

double stage_utility(const WorldModel& model, const std::string& state,
                     const std::string& action,
                     const std::vector<PlanConstraint>& constraints) {
  double u = model.mean_reward(state, action);
  for (const auto& c : constraints) {
    const double g = c.metric_fn ? c.metric_fn(state, action) : 0.0;
    u -= c.lambda * std::max(0.0, g - c.bound);
  }
  return u;
}

class ExactPlanner {
public:
  ExactPlanner(const WorldModel& model, const std::vector<std::string>& actions,
               const std::vector<PlanConstraint>& constraints, double gamma)
      : model_(model), actions_(actions), constraints_(constraints), gamma_(gamma) {}

  double q_value(const std::string& state, const std::string& action, std::uint32_t h) {
    const double u = stage_utility(model_, state, action, constraints_);
    if (h == 1) return u;
    double expected = 0.0;
    for (const auto& [next, p] : model_.next_distribution(state, action)) {
      if (p == 0.0) continue;
      expected += p * value(next, h - 1);
    }
    return u + gamma_ * expected;
  }

  double value(const std::string& state, std::uint32_t h) {
    const auto key = std::make_pair(state, h);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& a : actions_) {
      best = std::max(best, q_value(state, a, h));
    }
    memo_[key] = best;
    return best;
  }

private:
  const WorldModel& model_;
  const std::vector<std::string>& actions_;
  const std::vector<PlanConstraint>& constraints_;
  double gamma_;
  std::map<std::pair<std::string, std::uint32_t>, double> memo_;
};

std::string sample_next(const WorldModel& model, const std::string& state,
                        const std::string& action, sim::RngStream& rng) {
  const auto dist = model.next_distribution(state, action);
  double u = rng.next_double();
  for (const auto& [next, p] : dist) {
    if (u < p) return next;
    u -= p;
  }
  return dist.back().first;
}

const std::string& myopic_action(const WorldModel& model, const std::string& state,
                                 const std::vector<std::string>& actions,
                                 const std::vector<PlanConstraint>& constraints) {
  const std::string* best = &actions.front();
  double best_u = -std::numeric_limits<double>::infinity();
  for (const auto& a : actions) {
    const double u = stage_utility(model, state, a, constraints);
    if (u > best_u) {
      best_u = u;
      best = &a;
    }
  }
  return *best;
}

}  // namespace

double score_action(const WorldModel& model, const std::string& state,
                    const std::string& first_action,
                    const std::vector<std::string>& actions,
                    const std::vector<PlanConstraint>& constraints,
                    const PlannerConfig& cfg, sim::RngStream* rng) {
  if (cfg.horizon < 1) throw Error("InvalidValue", "planning horizon must be >= 1");
  if (cfg.exact) {
    ExactPlanner planner(model, actions, constraints, cfg.gamma);
    return planner.q_value(state, first_action, cfg.horizon);
  }
  if (cfg.rollouts < 1) throw Error("InvalidValue", "rollout count must be >= 1");
  if (rng == nullptr) throw Error("InvalidValue", "sampled planning needs an RNG stream");

  double total = 0.0;
  for (std::uint32_t k = 0; k < cfg.rollouts; ++k) {
    std::string s = state;
    std::string a = first_action;
    double discount = 1.0;
    double score = 0.0;
    for (std::uint32_t t = 0; t < cfg.horizon; ++t) {
      score += discount * stage_utility(model, s, a, constraints);
      discount *= cfg.gamma;
      if (t + 1 == cfg.horizon) break;
      s = sample_next(model, s, a, *rng);
      a = myopic_action(model, s, actions, constraints);
    }
    total += score;
  }
  return total / static_cast<double>(cfg.rollouts);
}

PlanResult plan(const WorldModel& model, const std::string& state,
                const std::vector<std::string>& actions,
                const std::vector<std::string>& candidates,
                const std::vector<PlanConstraint>& constraints, const PlannerConfig& cfg,
                sim::RngStream* rng) {
  if (candidates.empty()) {
    throw Error("EmptyCandidates", "plan called with no candidate actions");
  }
  PlanResult result;
  result.candidate_scores.reserve(candidates.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double score =
        score_action(model, state, candidates[i], actions, constraints, cfg, rng);
    result.candidate_scores.push_back(score);
    if (score > best) {  // strict: earlier declaration wins ties
      best = score;
      result.candidate_index = i;
      result.action = candidates[i];
      result.score = score;
    }
  }
  return result;
}

}  // namespace knetsim::agent
