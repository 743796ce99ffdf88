#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "knetsim/agent/agent.hpp"
#include "knetsim/agent/quantizer.hpp"
#include "knetsim/kb/intent.hpp"
#include "knetsim/kb/replica.hpp"
#include "knetsim/kb/sync.hpp"
#include "knetsim/nego/session.hpp"
#include "knetsim/net/topology.hpp"
#include "knetsim/scenario/engine.hpp"

namespace knetsim::scenario::intersection {

// One vehicle approaching the crossing: a fixed spatial path through the
// shared centre cell, a chosen entry delay, and live execution state.
struct Vehicle {
  EntityId id = 0;
  std::uint32_t arm = 0;
  std::vector<std::string> path;  // entry cell ... centre ... exit cell
  std::uint32_t base_start = 0;   // step the vehicle is ready to enter
  std::uint32_t delay = 0;        // negotiated entry delay in steps
  std::uint32_t last_good_delay = 0;
  bool has_last_good = false;
  double declared_score = 0.0;    // Lagrangian score of the declared delay
  std::int64_t pos = -1;          // index into path, -1 before entry
  std::optional<std::uint32_t> exit_step;
  bool collided = false;
};

// Full run state. A plain value: copying it is the simulation fork used for
// shadow validation.
struct World {
  sim::Kernel kernel{0};
  metrics::RunTrace trace;
  Policies policies;
  Mode mode = Mode::FullKraken;

  std::uint32_t n = 0;
  std::uint32_t episodes = 0;
  std::uint32_t warmup_episodes = 0;
  std::uint32_t arm_cells = 0;
  std::uint64_t step_ticks = 0;
  std::uint32_t max_delay = 0;
  std::uint32_t deadline_steps = 0;
  std::uint64_t frame_bits = 0;
  std::uint64_t intention_bits = 0;
  std::uint64_t beacon_bits = 0;
  std::uint64_t nego_message_bits = 0;
  std::uint64_t round_latency = 0;
  std::uint32_t r_max = 0;
  std::uint32_t spread = 1;
  bool hold_allowed = true;
  bool duals_frozen = false;

  EntityId roadside = 0;
  EntityId governor = 0;
  std::vector<Vehicle> vehicles;
  net::Topology topo;
  std::map<EntityId, kb::Replica> replicas;
  std::optional<kb::SyncGroup> sync;
  kb::SyncLayout layout;
  kb::IntentDescriptor intent;  // first-proposal conflict governance
  agent::GridQuantizer position_grid{{{0.0, 1.0, 1}}};

  std::uint32_t episode = 0;
  std::uint64_t next_session_id = 1;
  std::uint64_t next_object_id = 1;
  std::optional<nego::Session> session;
  std::uint32_t round0_conflicts = 0;
  std::uint64_t episode_start = 0;

  std::vector<std::string> nego_log;
  std::vector<std::string> reasoning_log;
  std::uint64_t collisions = 0;
  std::uint64_t vetoes = 0;
  std::uint64_t escalations = 0;
  double last_alignment_sample = 0.0;
};

World make_world(const ScenarioSpec& spec);

// Claims of a vehicle's trajectory when it enters `delay` steps after its
// ready step.
std::vector<nego::Claim> claims_for(const Vehicle& v, std::uint32_t delay);

// Collision predicate over a set of bound trajectories: true when two
// vehicles would occupy one cell at one step. The safety envelope.
bool envelope_violated(const std::vector<Vehicle>& vehicles);

// Shadow validation of the bound trajectories: forks the world, replays the
// motion, reports failure without touching the parent.
struct ShadowVerdict {
  bool pass = true;
  std::string reason;
};
ShadowVerdict shadow_validate(const World& world);

// Deterministic state digest; used to prove vetoed actions left no trace.
std::uint64_t world_hash(const World& world);

RunOutcome run(const ScenarioSpec& spec);

}  // namespace knetsim::scenario::intersection
