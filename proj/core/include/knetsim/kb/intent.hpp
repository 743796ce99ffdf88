#pragma once

#include <map>
#include <string>
#include <vector>

#include "knetsim/common.hpp"

namespace knetsim::kb {

struct ObjectiveTerm {
  std::string metric;
  double weight = 1.0;  // >= 0, finite
};

// One <= constraint with its price. lambda is the dual variable raised while
// the constraint is violated and projected back to zero when slack appears.
struct Constraint {
  std::string metric;
  double bound = 0.0;
  double lambda = 0.0;
  double step = 0.05;   // eta > 0
  double weight = 1.0;  // contribution to goal alignment error
};

struct IntentDescriptor {
  std::string id;
  std::vector<ObjectiveTerm> objective_terms;
  std::vector<Constraint> constraints;

  void validate() const;
  const Constraint* find_constraint(const std::string& metric) const;
};

// Projected subgradient ascent: lambda <- max(0, lambda + eta * (measured -
// bound)) for every constraint. Every constraint metric must be present in
// `measured`, otherwise Error("MissingMetric").
void update_duals(IntentDescriptor& intent, const std::map<std::string, double>& measured);

}  // namespace knetsim::kb
