#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "knetsim/common.hpp"

namespace knetsim::agent {

struct Transition {
  std::string prev;
  std::string action;
  std::string next;
  double reward = 0.0;
};

// Tabular dynamics model over a finite state alphabet: Laplace-smoothed
// transition counts plus running reward statistics per (state, action).
// Unvisited pairs fall back to uniform next-state probabilities and zero
// reward. Small enough to be exactly testable, rich enough to roll out
// hypothetical trajectories.
class WorldModel {
public:
  WorldModel() = default;
  WorldModel(std::vector<std::string> states, double smoothing, std::size_t memory_capacity)
      : states_(std::move(states)),
        smoothing_(smoothing),
        memory_capacity_(memory_capacity) {}

  void learn(const std::string& prev, const std::string& action, const std::string& next,
             double reward);

  // P(next | state, action) with Laplace smoothing; uniform when unvisited.
  double transition_prob(const std::string& state, const std::string& action,
                         const std::string& next) const;
  std::vector<std::pair<std::string, double>> next_distribution(
      const std::string& state, const std::string& action) const;

  double mean_reward(const std::string& state, const std::string& action) const;
  double reward_variance(const std::string& state, const std::string& action) const;
  std::uint64_t visit_count(const std::string& state, const std::string& action) const;

  const std::vector<std::string>& states() const { return states_; }
  const std::deque<Transition>& memory() const { return memory_; }

private:
  struct Cell {
    std::map<std::string, std::uint64_t> next_counts;
    std::uint64_t visits = 0;
    double reward_mean = 0.0;
    double reward_m2 = 0.0;
  };

  const Cell* find(const std::string& state, const std::string& action) const;

  std::vector<std::string> states_;
  double smoothing_ = 0.1;
  std::size_t memory_capacity_ = 1024;
  std::map<std::pair<std::string, std::string>, Cell> table_;
  std::deque<Transition> memory_;
};

}  // namespace knetsim::agent
