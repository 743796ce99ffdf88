#include "knetsim/agent/world_model.hpp"

#include <algorithm>

namespace knetsim::agent {

void WorldModel::learn(const std::string& prev, const std::string& action,
                       const std::string& next, double reward) {
  auto in_alphabet = [&](const std::string& s) {
    return std::find(states_.begin(), states_.end(), s) != states_.end();
  };
  if (!in_alphabet(prev) || !in_alphabet(next)) {
    throw Error("InvalidValue", "state outside the declared alphabet");
  }
  Cell& cell = table_[{prev, action}];
  cell.next_counts[next] += 1;
  cell.visits += 1;
  // Welford update for reward mean/variance.
  const double delta = reward - cell.reward_mean;
  cell.reward_mean += delta / static_cast<double>(cell.visits);
  cell.reward_m2 += delta * (reward - cell.reward_mean);

  memory_.push_back({prev, action, next, reward});
  if (memory_.size() > memory_capacity_) memory_.pop_front();
}

const WorldModel::Cell* WorldModel::find(const std::string& state,
                                         const std::string& action) const {
  auto it = table_.find({state, action});
  return it == table_.end() ? nullptr : &it->second;
}

double WorldModel::transition_prob(const std::string& state, const std::string& action,
                                   const std::string& next) const {
  const std::size_t n_states = states_.size();
  const Cell* cell = find(state, action);
  if (cell == nullptr || cell->visits == 0) {
    return 1.0 / static_cast<double>(n_states);
  }
  const auto it = cell->next_counts.find(next);
  const double count = it == cell->next_counts.end()
                           ? 0.0
                           : static_cast<double>(it->second);
  return (count + smoothing_) /
         (static_cast<double>(cell->visits) + smoothing_ * static_cast<double>(n_states));
}

std::vector<std::pair<std::string, double>> WorldModel::next_distribution(
    const std::string& state, const std::string& action) const {
  std::vector<std::pair<std::string, double>> dist;
  dist.reserve(states_.size());
  for (const auto& next : states_) {
    dist.emplace_back(next, transition_prob(state, action, next));
  }
  return dist;
}

double WorldModel::mean_reward(const std::string& state, const std::string& action) const {
  const Cell* cell = find(state, action);
  return cell == nullptr ? 0.0 : cell->reward_mean;
}

double WorldModel::reward_variance(const std::string& state,
                                   const std::string& action) const {
  const Cell* cell = find(state, action);
  if (cell == nullptr || cell->visits < 2) return 0.0;
  return cell->reward_m2 / static_cast<double>(cell->visits - 1);
}

std::uint64_t WorldModel::visit_count(const std::string& state,
                                      const std::string& action) const {
  const Cell* cell = find(state, action);
  return cell == nullptr ? 0 : cell->visits;
}

}  // namespace knetsim::agent
