#include "knetsim/kb/intent.hpp"

#include <algorithm>
#include <cmath>

namespace knetsim::kb {

void IntentDescriptor::validate() const {
  if (objective_terms.empty()) {
    throw Error("InvalidValue", "intent " + id + " needs at least one objective term");
  }
  for (const auto& term : objective_terms) {
    if (!(term.weight >= 0.0) || !std::isfinite(term.weight)) {
      throw Error("InvalidValue", "objective weight must be finite and non-negative");
    }
  }
  for (const auto& c : constraints) {
    if (c.lambda < 0.0) throw Error("InvalidValue", "dual variable must be non-negative");
    if (!(c.step > 0.0)) throw Error("InvalidValue", "dual step must be positive");
  }
}

const Constraint* IntentDescriptor::find_constraint(const std::string& metric) const {
  for (const auto& c : constraints) {
    if (c.metric == metric) return &c;
  }
  return nullptr;
}

void update_duals(IntentDescriptor& intent, const std::map<std::string, double>& measured) {
  for (const auto& c : intent.constraints) {
    if (measured.find(c.metric) == measured.end()) {
      throw Error("MissingMetric", "no measurement for constraint metric " + c.metric);
    }
  }
  for (auto& c : intent.constraints) {
    const double m = measured.at(c.metric);
    c.lambda = std::max(0.0, c.lambda + c.step * (m - c.bound));
  }
}

}  // namespace knetsim::kb
