#include "knetsim/scenario/engine.hpp"

namespace knetsim::scenario {

RunOutcome run_scenario(const ScenarioSpec& spec) {
  if (spec.name == "intersection") return run_intersection(spec);
  if (spec.name == "xr") return run_xr(spec);
  if (spec.name == "sensing") return run_sensing(spec);
  if (spec.name == "dual-toy") return run_dual_toy(spec);
  if (spec.name == "sync-stress") return run_sync_stress(spec);
  throw Error("InvalidValue", "unknown scenario '" + spec.name + "'");
}

}  // namespace knetsim::scenario
