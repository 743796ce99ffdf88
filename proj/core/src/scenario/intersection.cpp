#include "knetsim/scenario/intersection.hpp"

#include <algorithm>
#include <sstream>

namespace knetsim::scenario::intersection {

namespace {

// Event payload codes carried in Event::arg0.
enum Phase : std::uint64_t {
  kDeclare = 1,
  kSync = 2,
  kNegoStart = 3,
  kExecStep = 4,
  kEpisodeEnd = 5,
};

constexpr double kStickyBonus = 0.3;

std::string arm_name(std::uint32_t arm) {
  static const char* names[4] = {"N", "E", "S", "W"};
  return names[arm % 4];
}

std::uint32_t opposite(std::uint32_t arm) { return (arm + 2) % 4; }

std::vector<std::string> build_path(std::uint32_t arm, std::uint32_t arm_cells) {
  std::vector<std::string> path;
  for (std::uint32_t i = 0; i < arm_cells; ++i) {
    path.push_back(arm_name(arm) + ":in" + std::to_string(i));
  }
  path.push_back("C");
  for (std::uint32_t i = 0; i < arm_cells; ++i) {
    path.push_back(arm_name(opposite(arm)) + ":out" + std::to_string(i));
  }
  return path;
}

double delay_utility(std::uint32_t delay, std::uint32_t max_delay) {
  return 1.0 - static_cast<double>(delay) / static_cast<double>(max_delay + 1);
}

kb::Payload encode_claims(const std::vector<nego::Claim>& claims,
                          const std::map<std::string, std::uint32_t>& cell_index) {
  kb::Payload payload;
  payload.tag = "traj";
  for (const auto& c : claims) {
    payload.values.push_back(static_cast<double>(c.step));
    payload.values.push_back(static_cast<double>(cell_index.at(c.resource)));
  }
  return payload;
}

std::vector<nego::Claim> decode_claims(const kb::Payload& payload,
                                       const std::vector<std::string>& cells) {
  std::vector<nego::Claim> claims;
  for (std::size_t i = 0; i + 1 < payload.values.size(); i += 2) {
    claims.push_back({cells.at(static_cast<std::size_t>(payload.values[i + 1])),
                      static_cast<std::uint32_t>(payload.values[i])});
  }
  return claims;
}

}  // namespace

std::vector<nego::Claim> claims_for(const Vehicle& v, std::uint32_t delay) {
  std::vector<nego::Claim> claims;
  const std::uint32_t start = v.base_start + delay;
  for (std::uint32_t j = 0; j < v.path.size(); ++j) {
    claims.push_back({v.path[j], start + j});
  }
  return claims;
}

bool envelope_violated(const std::vector<Vehicle>& vehicles) {
  std::set<nego::Claim> seen;
  for (const auto& v : vehicles) {
    for (const auto& c : claims_for(v, v.delay)) {
      if (!seen.insert(c).second) return true;
    }
  }
  return false;
}

ShadowVerdict shadow_validate(const World& world) {
  // Fork: an independent copy of the whole simulation state. The motion that
  // would follow the bound trajectories is replayed on the copy and checked
  // against the envelope; the parent is never touched.
  World fork = world;
  if (envelope_violated(fork.vehicles)) {
    return {false, "collision"};
  }
  return {true, ""};
}

std::uint64_t world_hash(const World& world) {
  std::uint64_t h = kFnvOffset;
  h = fnv1a(h, world.kernel.now().ticks);
  for (const auto& v : world.vehicles) {
    h = fnv1a(h, static_cast<std::uint64_t>(v.id));
    h = fnv1a(h, static_cast<std::uint64_t>(v.delay));
    h = fnv1a(h, static_cast<std::uint64_t>(v.pos));
    h = fnv1a(h, static_cast<std::uint64_t>(v.collided ? 1 : 0));
    h = fnv1a(h, static_cast<std::uint64_t>(v.exit_step.value_or(0xffffffff)));
  }
  for (const auto& [id, replica] : world.replicas) {
    h = fnv1a(h, static_cast<std::uint64_t>(id));
    h = fnv1a(h, replica.epoch());
  }
  h = fnv1a(h, world.trace.transmissions.size());
  h = fnv1a(h, world.collisions);
  return h;
}

namespace {

struct Runner {
  World& w;
  std::vector<std::string> cells;  // deterministic cell list
  std::map<std::string, std::uint32_t> cell_index;

  explicit Runner(World& world) : w(world) {
    std::set<std::string> cell_set;
    for (const auto& v : w.vehicles) {
      for (const auto& c : v.path) cell_set.insert(c);
    }
    cells.assign(cell_set.begin(), cell_set.end());
    for (std::uint32_t i = 0; i < cells.size(); ++i) cell_index[cells[i]] = i;
  }

  double lambda() const { return w.intent.constraints.front().lambda; }

  std::vector<nego::Claim> peer_claims(const Vehicle& v) const {
    std::vector<nego::Claim> claims;
    const auto& replica = w.replicas.at(v.id);
    for (const auto& [key, obj] : replica.current()) {
      if (key.second != kb::ObjectKind::Intention || key.first == v.id) continue;
      if (!obj.valid_at(w.kernel.now())) continue;
      for (auto& c : decode_claims(obj.payload, cells)) claims.push_back(c);
    }
    return claims;
  }

  std::uint32_t overlap(const std::vector<nego::Claim>& a,
                        const std::vector<nego::Claim>& b) const {
    std::uint32_t count = 0;
    for (const auto& ca : a) {
      for (const auto& cb : b) {
        if (ca == cb) ++count;
      }
    }
    return count;
  }

  // Lagrangian delay choice: utility minus the dual-priced expected conflict
  // count against the peer intentions currently in the vehicle's replica.
  void declare(Vehicle& v) {
    const auto peers = peer_claims(v);
    std::vector<double> scores;
    std::uint32_t best = 0;
    double best_score = -1e300;
    for (std::uint32_t d = 0; d <= w.max_delay; ++d) {
      const auto mine = claims_for(v, d);
      const double conflicts = static_cast<double>(overlap(mine, peers));
      double score = delay_utility(d, w.max_delay) - lambda() * conflicts;
      if (v.has_last_good && d == v.last_good_delay && lambda() > 0.0) {
        score += kStickyBonus;  // hysteresis against churn between episodes
      }
      scores.push_back(score);
      if (score > best_score) {
        best_score = score;
        best = d;
      }
    }
    v.delay = best;
    v.declared_score = best_score;

    // Intention object: the trajectory this vehicle intends to follow.
    const auto claims = claims_for(v, v.delay);
    auto obj = kb::make_object(w.next_object_id++, kb::ObjectKind::Intention, v.id,
                               encode_claims(claims, cell_index), 1.0, w.kernel.now(),
                               {w.kernel.now().ticks + 4 * episode_span()}, v.id,
                               w.episode + 1);
    w.replicas.at(v.id).upsert(obj, w.kernel.now());

    if (w.mode == Mode::Semantic) {
      // Explicit intention message to the roadside; in full mode the sync
      // round carries the object instead.
      const net::Link* link = w.topo.find_link(v.id, w.roadside);
      send_message(w.kernel, w.trace, *link, w.intention_bits, 0.9, true, 0.9, w.policies,
                   "uplink-intention", true);
    }
    w.kernel.schedule({w.kernel.now(), 0, w.roadside, sim::EventKind::PacketArrival,
                       v.id, 0});

    std::ostringstream line;
    line << w.kernel.now().ticks << "," << v.id << ",delay=" << v.delay << ","
         << format_double(best_score) << "," << format_double(lambda());
    w.reasoning_log.push_back(line.str());

    // Reasoning trace object: decision, top scores, duals in force.
    std::sort(scores.rbegin(), scores.rend());
    if (scores.size() > 3) scores.resize(3);
    kb::Payload trace_payload;
    trace_payload.tag = "decision";
    trace_payload.values = scores;
    trace_payload.values.push_back(lambda());
    auto trace_obj = kb::make_object(w.next_object_id++, kb::ObjectKind::ReasoningTrace,
                                     v.id, trace_payload, 1.0, w.kernel.now(),
                                     {w.kernel.now().ticks + episode_span()}, v.id,
                                     w.episode + 1);
    w.replicas.at(v.id).upsert(trace_obj, w.kernel.now());
  }

  std::uint64_t episode_span() const {
    return (static_cast<std::uint64_t>(w.deadline_steps) + w.max_delay + 8) * w.step_ticks +
           (w.r_max + 2) * w.round_latency + 4000;
  }

  void run_sync() {
    if (!w.sync) return;
    auto observer = [&](EntityId, EntityId, const kb::Delta& delta,
                        const std::vector<kb::UpsertStatus>& statuses) {
      w.trace.record_bits(w.kernel.now(), w.policies.sync_message_bits, false, true, 0.5,
                          "sync");
      w.trace.sync_bits += w.policies.sync_message_bits;
      for (std::size_t i = 0; i < delta.upserts.size(); ++i) {
        const auto& obj = delta.upserts[i];
        const std::uint64_t bits = obj.kind == kb::ObjectKind::Intention
                                       ? w.intention_bits
                                       : w.policies.sync_object_bits;
        const bool novel = statuses[i] == kb::UpsertStatus::Accepted;
        w.trace.record_bits(w.kernel.now(), bits, novel, true, 0.9, "sync");
        w.trace.sync_bits += bits;
      }
    };
    w.sync->set_observer(observer);
    const auto report = w.sync->sync_round(w.replicas, w.layout, kb::SyncMode::Hierarchical,
                                           w.kernel.now());
    w.sync->set_observer({});
    w.trace.sync_messages += report.messages;
  }

  // Greedy serialization: the deterministic fallback coordinator. Assigns
  // the smallest delay that keeps each trajectory disjoint from everything
  // already reserved, in agent id order.
  std::map<EntityId, std::uint32_t> serialize_assignment() const {
    std::map<EntityId, std::uint32_t> assignment;
    std::set<nego::Claim> reserved;
    for (const auto& v : w.vehicles) {
      std::uint32_t chosen = w.max_delay;
      for (std::uint32_t d = 0; d <= w.max_delay; ++d) {
        const auto claims = claims_for(v, d);
        const bool clear = std::none_of(claims.begin(), claims.end(), [&](const auto& c) {
          return reserved.count(c) != 0;
        });
        if (clear) {
          chosen = d;
          break;
        }
      }
      assignment[v.id] = chosen;
      for (const auto& c : claims_for(v, chosen)) reserved.insert(c);
    }
    return assignment;
  }

  void apply_assignment(const std::map<EntityId, std::uint32_t>& assignment) {
    for (auto& v : w.vehicles) {
      v.delay = assignment.at(v.id);
    }
  }

  void start_negotiation() {
    w.session.emplace(w.next_session_id++, w.r_max, w.hold_allowed);
    for (auto& v : w.vehicles) {
      nego::Proposal p;
      p.agent = v.id;
      p.trajectory = claims_for(v, v.delay);
      p.claimed_utility = delay_utility(v.delay, w.max_delay);
      // Dual-weighted utility, frozen for the session; deterministic jitter
      // keeps priorities distinct across symmetric vehicles.
      const double jitter =
          static_cast<double>(w.kernel.entity_rng(v.id).next_below(1000)) * 1e-6;
      p.priority = v.declared_score + jitter;
      w.session->submit(p);
    }
    w.round0_conflicts = static_cast<std::uint32_t>(w.session->detect_conflicts().size());
    // Session setup exchange: every participant broadcasts its proposal.
    record_round_messages();
    w.kernel.schedule({{w.kernel.now().ticks + w.round_latency}, 0, w.roadside,
                       sim::EventKind::NegotiationRound, w.session->id(), 0});
  }

  void record_round_messages() {
    for (std::size_t i = 0; i < w.vehicles.size(); ++i) {
      w.trace.record_bits(w.kernel.now(), w.nego_message_bits, false, true, 0.5,
                          "negotiation");
    }
  }

  // Concession replanner. Before the relief round the conceder probes only a
  // narrow window of small delays, randomised from its own stream, and never
  // lands on a claim that is already contested or overlaps a peer in more
  // than one cell. From the relief round on it avoids every live claim, in
  // which case convergence is immediate because conceders run sequentially.
  std::optional<std::vector<nego::Claim>> replan(EntityId agent,
                                                 const std::set<nego::Claim>& excluded,
                                                 std::uint32_t round) {
    Vehicle& v = vehicle(agent);
    const std::uint32_t relief_round = w.r_max > 3 ? w.r_max - 3 : 1;

    std::map<nego::Claim, std::uint32_t> live;  // claim -> #owners among others
    for (const auto& [id, proposal] : w.session->proposals()) {
      if (id == agent) continue;
      for (const auto& c : proposal.trajectory) live[c] += 1;
    }

    std::vector<std::uint32_t> feasible;
    for (std::uint32_t d = 0; d <= w.max_delay; ++d) {
      const auto claims = claims_for(v, d);
      bool ok = true;
      std::uint32_t touched = 0;
      for (const auto& c : claims) {
        if (excluded.count(c) != 0) {
          ok = false;
          break;
        }
        auto it = live.find(c);
        if (it != live.end()) {
          if (it->second >= 2 || round >= relief_round) {
            ok = false;  // contested cell, or relief mode avoids everything
            break;
          }
          touched += 1;
        }
      }
      // Touching more than one live claim would trade one conflict for
      // several; skip such candidates to keep the conflict count monotone.
      if (ok && touched <= 1) feasible.push_back(d);
      if (ok && round >= relief_round) {
        return claims_for(v, d);  // first fully clear delay
      }
    }
    if (feasible.empty()) return std::nullopt;
    const std::uint64_t window = std::min<std::uint64_t>(w.spread, feasible.size());
    const std::uint32_t pick = feasible[static_cast<std::size_t>(
        w.kernel.entity_rng(v.id).next_below(window))];
    return claims_for(v, pick);
  }

  Vehicle& vehicle(EntityId id) {
    for (auto& v : w.vehicles) {
      if (v.id == id) return v;
    }
    throw Error("UnknownEntity", "no vehicle " + std::to_string(id));
  }

  void negotiation_round() {
    auto& session = *w.session;
    if (session.detect_conflicts().empty()) {
      close_session(nego::OutcomeKind::Converged);
      return;
    }
    if (session.round() >= session.r_max()) {
      escalate();
      return;
    }
    const auto log = session.negotiate_round(
        [&](EntityId agent, const std::set<nego::Claim>& excluded, std::uint32_t round) {
          return replan(agent, excluded, round);
        });
    for (EntityId agent : log.conceders) {
      std::ostringstream line;
      line << w.kernel.now().ticks << "," << session.id() << "," << log.round << ","
           << log.conflicts << "," << agent;
      w.nego_log.push_back(line.str());
    }
    record_round_messages();
    w.kernel.schedule({{w.kernel.now().ticks + w.round_latency}, 0, w.roadside,
                       sim::EventKind::NegotiationRound, session.id(), 0});
  }

  // Hierarchical escalation: the infrastructure agent resolves what the
  // peers could not, by binding a serialized joint assignment.
  void escalate() {
    w.escalations += 1;
    apply_assignment(serialize_assignment());
    std::ostringstream line;
    line << w.kernel.now().ticks << "," << w.session->id() << "," << w.session->round()
         << ",escalated," << w.roadside;
    w.nego_log.push_back(line.str());
    close_session(nego::OutcomeKind::Escalated);
  }

  void close_session(nego::OutcomeKind kind) {
    auto& session = *w.session;
    if (kind == nego::OutcomeKind::Converged) {
      // Adopt the negotiated trajectories.
      for (auto& v : w.vehicles) {
        const auto& traj = session.proposals().at(v.id).trajectory;
        if (!traj.empty()) {
          v.delay = traj.front().step - v.base_start;
        }
      }
    }
    const std::uint32_t rounds = session.round();
    metrics::NegotiationRecord rec;
    rec.session = session.id();
    rec.rounds = rounds;
    rec.converged = kind == nego::OutcomeKind::Converged;
    // One setup exchange plus one round trip per executed round.
    rec.delay = {(static_cast<std::uint64_t>(rounds) + 1) * w.round_latency};
    w.trace.negotiations.push_back(rec);
    w.session.reset();

    // Safety gate: validate the bound trajectories in a forked twin before
    // any vehicle moves. A veto falls back to serialized crossing.
    const auto verdict = shadow_validate(w);
    if (!verdict.pass) {
      w.vetoes += 1;
      apply_assignment(serialize_assignment());
    }
    for (auto& v : w.vehicles) {
      v.last_good_delay = v.delay;
      v.has_last_good = true;
    }
    schedule_step(0);
  }

  void schedule_step(std::uint32_t step) {
    w.kernel.schedule({{w.kernel.now().ticks + w.step_ticks}, 0, w.roadside,
                       sim::EventKind::AgentTick, kExecStep, step});
  }

  void exec_step(std::uint32_t step) {
    std::map<std::string, EntityId> occupancy;
    bool any_active = false;
    for (auto& v : w.vehicles) {
      if (v.exit_step.has_value()) continue;
      any_active = true;
      const std::uint32_t start = v.base_start + v.delay;
      const bool waiting = step < start;

      if (w.mode == Mode::DataCentric) {
        const net::Link* link = w.topo.find_link(v.id, w.roadside);
        const bool moved = !waiting;
        send_raw_frame(w.kernel, w.trace, *link, w.frame_bits,
                       moved ? w.intention_bits : 0, "uplink-raw");
      } else if (w.mode == Mode::Semantic && waiting) {
        const net::Link* link = w.topo.find_link(v.id, w.roadside);
        send_message(w.kernel, w.trace, *link, w.beacon_bits, 0.2, step == 0, 0.2,
                     w.policies, "uplink-beacon", true);
      }

      if (waiting) continue;
      const auto pos = static_cast<std::int64_t>(step) - start;
      if (pos >= static_cast<std::int64_t>(v.path.size())) {
        v.exit_step = step;
        continue;
      }
      v.pos = pos;

      // Perception: continuous progress quantised back to the cell grid.
      auto& rng = w.kernel.entity_rng(v.id);
      const double raw = static_cast<double>(pos) + 0.5 + rng.next_range(-0.4, 0.4);
      auto [state, distortion] = w.position_grid.perceive(v.id, {raw}, w.kernel.now());
      w.trace.distortions.push_back(distortion);
      w.trace.distortion_weights.push_back(0.9);

      const std::string& cell = v.path[static_cast<std::size_t>(pos)];
      auto [it, inserted] = occupancy.insert({cell, v.id});
      if (!inserted) {
        w.collisions += 1;
        w.trace.envelope_violations += 1;
        v.collided = true;
        vehicle(it->second).collided = true;
      }
    }

    const bool all_done = std::all_of(w.vehicles.begin(), w.vehicles.end(),
                                      [](const Vehicle& v) { return v.exit_step.has_value(); });
    const std::uint32_t step_cap =
        w.deadline_steps + w.max_delay + static_cast<std::uint32_t>(2 * w.arm_cells) + 4;
    if (!all_done && any_active && step < step_cap) {
      schedule_step(step + 1);
    } else {
      w.kernel.schedule({{w.kernel.now().ticks + w.step_ticks}, 0, w.governor,
                         sim::EventKind::MetricSample, kEpisodeEnd, 0});
    }
  }

  void episode_end() {
    for (auto& v : w.vehicles) {
      const bool crossed = v.exit_step.has_value() &&
                           *v.exit_step <= v.base_start + w.deadline_steps;
      w.trace.task_successes.push_back(crossed && !v.collided);
    }

    // Goal governance: measure first-proposal conflicts, raise or relax the
    // dual, and sample the constraint after warm-up.
    const double measured = static_cast<double>(w.round0_conflicts);
    if (w.episode >= w.warmup_episodes) {
      w.trace.constraint_samples.push_back(
          {w.kernel.now(), w.intent.constraints.front().metric, measured});
    }
    if (w.mode == Mode::FullKraken && !w.duals_frozen) {
      kb::update_duals(w.intent, {{w.intent.constraints.front().metric, measured}});
    }
    w.last_alignment_sample = measured;

    for (auto& [id, replica] : w.replicas) {
      replica.expire(w.kernel.now());
    }

    w.episode += 1;
    if (w.episode < w.episodes) {
      start_episode();
    }
  }

  void start_episode() {
    w.episode_start = w.kernel.now().ticks + w.step_ticks;
    for (auto& v : w.vehicles) {
      v.delay = 0;
      v.pos = -1;
      v.exit_step.reset();
      v.collided = false;
    }
    w.round0_conflicts = 0;
    for (const auto& v : w.vehicles) {
      w.kernel.schedule({{w.episode_start}, 0, v.id, sim::EventKind::AgentTick, kDeclare, 0});
    }
    if (w.mode == Mode::FullKraken) {
      w.kernel.schedule({{w.episode_start + 1000}, 0, w.roadside,
                         sim::EventKind::SyncTrigger, kSync, 0});
      w.kernel.schedule({{w.episode_start + 2000}, 0, w.roadside, sim::EventKind::AgentTick,
                         kNegoStart, 0});
    } else {
      w.kernel.schedule({{w.episode_start + 2000}, 0, w.roadside, sim::EventKind::AgentTick,
                         kNegoStart, 0});
    }
  }

  void serialized_start() {
    // Conventional coordination: the roadside assigns crossing slots and
    // notifies each vehicle with a control message.
    apply_assignment(serialize_assignment());
    for (const auto& v : w.vehicles) {
      const net::Link* link = w.topo.find_link(w.roadside, v.id);
      send_message(w.kernel, w.trace, *link, w.nego_message_bits, 0.8, true, 0.8,
                   w.policies, "downlink-control", true);
    }
    for (auto& v : w.vehicles) {
      v.last_good_delay = v.delay;
      v.has_last_good = true;
    }
    schedule_step(0);
  }

  void handle(const sim::Event& ev) {
    switch (ev.kind) {
      case sim::EventKind::AgentTick:
        if (ev.arg0 == kDeclare) {
          declare(vehicle(ev.target));
        } else if (ev.arg0 == kNegoStart) {
          if (w.mode == Mode::FullKraken) {
            start_negotiation();
          } else {
            serialized_start();
          }
        } else if (ev.arg0 == kExecStep) {
          exec_step(static_cast<std::uint32_t>(ev.arg1));
        }
        break;
      case sim::EventKind::SyncTrigger:
        run_sync();
        break;
      case sim::EventKind::NegotiationRound:
        negotiation_round();
        break;
      case sim::EventKind::MetricSample:
        episode_end();
        break;
      case sim::EventKind::PacketArrival:
        break;  // arrival markers only
    }
  }
};

}  // namespace

World make_world(const ScenarioSpec& spec) {
  const auto& cfg = spec.cfg;
  World w;
  w.kernel = sim::Kernel(spec.seed);
  w.policies = Policies::from(cfg);
  w.mode = spec.mode;
  w.n = static_cast<std::uint32_t>(cfg.u64("intersection.n_vehicles"));
  w.episodes = static_cast<std::uint32_t>(cfg.u64("intersection.episodes"));
  w.warmup_episodes = static_cast<std::uint32_t>(cfg.u64("intersection.warmup_episodes"));
  w.arm_cells = static_cast<std::uint32_t>(cfg.u64("intersection.arm_cells"));
  w.step_ticks = cfg.u64("intersection.step_ticks");
  w.max_delay = static_cast<std::uint32_t>(cfg.u64("intersection.max_delay"));
  w.deadline_steps = static_cast<std::uint32_t>(cfg.u64("intersection.deadline_steps"));
  w.frame_bits = cfg.u64("intersection.frame_bits");
  w.intention_bits = cfg.u64("intersection.intention_bits");
  w.beacon_bits = cfg.u64("intersection.beacon_bits");
  w.nego_message_bits = cfg.u64("negotiation.message_bits");
  w.round_latency = cfg.u64("negotiation.round_latency_ticks");
  w.r_max = static_cast<std::uint32_t>(cfg.u64("negotiation.r_max"));
  w.spread = static_cast<std::uint32_t>(cfg.u64("negotiation.concession_spread"));
  w.hold_allowed = cfg.flag("negotiation.hold_allowed");
  w.duals_frozen = cfg.flag("duals.frozen");

  const double link_loss = cfg.f64("intersection.link_loss");

  for (std::uint32_t i = 0; i < w.n; ++i) {
    Vehicle v;
    v.id = w.kernel.register_entity("vehicle" + std::to_string(i));
    v.arm = i % 4;
    v.path = build_path(v.arm, w.arm_cells);
    v.base_start = 0;  // synchronized arrivals: worst-case contention
    w.vehicles.push_back(std::move(v));
  }
  w.roadside = w.kernel.register_entity("roadside");
  w.governor = w.kernel.register_entity("governor");

  for (const auto& v : w.vehicles) {
    w.topo.add_node({v.id, net::NodeLevel::UserEquipment, 1.0});
    w.topo.add_link({v.id, w.roadside, 10000000, {500}, link_loss});
    w.topo.add_link({w.roadside, v.id, 10000000, {500}, link_loss});
  }
  w.topo.add_node({w.roadside, net::NodeLevel::BaseStation, 16.0});

  for (const auto& v : w.vehicles) {
    w.replicas.emplace(v.id, kb::Replica(v.id));
  }
  w.replicas.emplace(w.roadside, kb::Replica(w.roadside));

  kb::Cluster cluster;
  cluster.head = w.roadside;
  for (const auto& v : w.vehicles) cluster.members.push_back(v.id);
  w.layout.clusters.push_back(cluster);
  w.sync.emplace(w.policies.delta, parse_sync_kinds(cfg.str("knowledge.sync_kinds")));

  w.intent.id = "crossing-coordination";
  w.intent.objective_terms = {{"crossing_throughput", 1.0}};
  kb::Constraint c;
  c.metric = "episode_conflicts";
  c.bound = cfg.f64("intersection.duals.conflict_bound");
  c.lambda = 0.0;
  c.step = cfg.f64("intersection.duals.eta");
  c.weight = 1.0;
  w.intent.constraints.push_back(c);
  w.intent.validate();

  const std::uint32_t path_len = 2 * w.arm_cells + 1;
  w.position_grid = agent::GridQuantizer(
      {{0.0, static_cast<double>(path_len), path_len}});
  return w;
}

RunOutcome run(const ScenarioSpec& spec) {
  World w = make_world(spec);
  Runner runner(w);
  runner.start_episode();
  w.kernel.run_until(spec.horizon, [&](const sim::Event& ev) { runner.handle(ev); });

  RunOutcome out;
  out.report = metrics::compute_report(w.trace, {w.intent},
                                       spec.cfg.flag("metrics.weighted_distortion"));

  std::uint64_t uplink = 0;
  std::uint64_t nego_bits = 0;
  for (const auto& tx : w.trace.transmissions) {
    if (tx.category.rfind("uplink-", 0) == 0) uplink += tx.bits;
    if (tx.category == "negotiation") nego_bits += tx.bits;
  }
  std::uint64_t in_band = 0;
  std::uint64_t converged = 0;
  for (const auto& rec : w.trace.negotiations) {
    if (!rec.converged) continue;
    ++converged;
    if (rec.delay.ticks >= 30000 && rec.delay.ticks <= 60000) ++in_band;
  }

  auto& extras = out.report.extras;
  extras["collisions"] = std::to_string(w.collisions);
  extras["episodes"] = std::to_string(w.episodes);
  extras["escalations"] = std::to_string(w.escalations);
  extras["lambda_final"] = format_double(w.intent.constraints.front().lambda);
  extras["n_vehicles"] = std::to_string(w.n);
  extras["nego_bits"] = std::to_string(nego_bits);
  extras["nego_delay_in_band"] =
      converged == 0 ? "-" : format_double(static_cast<double>(in_band) /
                                           static_cast<double>(converged));
  extras["round0_conflicts_last"] = std::to_string(w.round0_conflicts);
  extras["sizes.beacon_bits"] = std::to_string(w.beacon_bits);
  extras["sizes.frame_bits"] = std::to_string(w.frame_bits);
  extras["sizes.intention_bits"] = std::to_string(w.intention_bits);
  extras["sizes.negotiation_message_bits"] = std::to_string(w.nego_message_bits);
  extras["uplink_bits"] = std::to_string(uplink);
  extras["vetoes"] = std::to_string(w.vetoes);

  out.trace = std::move(w.trace);
  out.kernel_trace = w.kernel.trace().render();
  out.negotiation_log = std::move(w.nego_log);
  out.reasoning_log = std::move(w.reasoning_log);
  for (const auto& [id, replica] : w.replicas) {
    for (const auto& rec : replica.rejections()) {
      out.rejection_log.push_back(std::to_string(rec.tick.ticks) + "," +
                                  std::to_string(rec.subject) + "," +
                                  std::string(kb::to_string(rec.kind)) + "," + rec.reason);
    }
  }
  if (w.collisions > 0) {
    out.exit_status = 2;
    out.failure = "envelope:collision";
  }
  return out;
}

}  // namespace knetsim::scenario::intersection

namespace knetsim::scenario {

RunOutcome run_intersection(const ScenarioSpec& spec) {
  return intersection::run(spec);
}

}  // namespace knetsim::scenario
