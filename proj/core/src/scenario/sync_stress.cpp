#include <optional>

#include "knetsim/kb/sync.hpp"
#include "knetsim/scenario/engine.hpp"

namespace knetsim::scenario {

namespace {

// Synchronisation scaling probe: N replicas, every one of them dirtied
// before each round (worst case), message counts compared between flat
// pairwise exchange and hierarchical aggregation over clusters of size k.
struct StressWorld {
  sim::Kernel kernel{0};
  metrics::RunTrace trace;
  Policies policies;

  std::uint32_t n = 0;
  std::uint64_t rounds_left = 0;
  kb::SyncMode mode = kb::SyncMode::Hierarchical;

  std::vector<EntityId> agents;
  std::map<EntityId, kb::Replica> replicas;
  std::optional<kb::SyncGroup> sync;
  kb::SyncLayout layout;
  std::uint64_t round = 0;
  std::uint64_t next_object_id = 1;
};

void stress_round(StressWorld& w) {
  w.round += 1;
  for (std::uint32_t i = 0; i < w.n; ++i) {
    const EntityId id = w.agents[i];
    auto fact = kb::make_object(w.next_object_id++, kb::ObjectKind::Fact, id,
                                {{static_cast<double>(w.round)}, "state"}, 1.0,
                                w.kernel.now(), {w.kernel.now().ticks + 10000000}, id,
                                w.round);
    w.replicas.at(id).upsert(fact, w.kernel.now());
  }
  auto observer = [&](EntityId, EntityId, const kb::Delta& delta,
                      const std::vector<kb::UpsertStatus>&) {
    const std::uint64_t bits = w.policies.sync_message_bits +
                               w.policies.sync_object_bits *
                                   (delta.upserts.size() + delta.expirations.size());
    w.trace.record_bits(w.kernel.now(), bits, false, true, 0.5, "sync");
    w.trace.sync_bits += bits;
  };
  w.sync->set_observer(observer);
  const auto report = w.sync->sync_round(w.replicas, w.layout, w.mode, w.kernel.now());
  w.sync->set_observer({});
  w.trace.sync_messages += report.messages;
}

}  // namespace

RunOutcome run_sync_stress(const ScenarioSpec& spec) {
  const auto& cfg = spec.cfg;
  StressWorld w;
  w.kernel = sim::Kernel(spec.seed);
  w.policies = Policies::from(cfg);
  w.n = static_cast<std::uint32_t>(cfg.u64("sync_stress.n_agents"));
  w.mode = cfg.str("knowledge.sync_mode") == "flat" ? kb::SyncMode::Flat
                                                    : kb::SyncMode::Hierarchical;
  const std::uint64_t rounds = cfg.u64("sync_stress.rounds");
  const std::uint64_t k = cfg.u64("knowledge.cluster_k");

  for (std::uint32_t i = 0; i < w.n; ++i) {
    const EntityId id = w.kernel.register_entity("agent" + std::to_string(i));
    w.agents.push_back(id);
    w.replicas.emplace(id, kb::Replica(id));
  }
  kb::Cluster cluster;
  std::uint32_t head_idx = 0;
  for (EntityId agent : w.agents) {
    if (cluster.members.empty()) {
      cluster.head = w.kernel.register_entity("aggregator" + std::to_string(head_idx++));
      w.replicas.emplace(cluster.head, kb::Replica(cluster.head));
    }
    cluster.members.push_back(agent);
    if (cluster.members.size() == k) {
      w.layout.clusters.push_back(cluster);
      cluster.members.clear();
    }
  }
  if (!cluster.members.empty()) w.layout.clusters.push_back(cluster);
  if (w.layout.clusters.size() > 1) {
    w.layout.root = w.kernel.register_entity("root-aggregator");
    w.replicas.emplace(w.layout.root, kb::Replica(w.layout.root));
  }
  w.sync.emplace(w.policies.delta, parse_sync_kinds(cfg.str("knowledge.sync_kinds")));

  const std::uint64_t period = cfg.u64("knowledge.sync_period_ticks");
  for (std::uint64_t r = 0; r < rounds; ++r) {
    w.kernel.schedule({{(r + 1) * period}, 0, w.agents.front(),
                       sim::EventKind::SyncTrigger, r, 0});
  }

  w.kernel.run_until(spec.horizon, [&](const sim::Event& ev) {
    if (ev.kind == sim::EventKind::SyncTrigger) stress_round(w);
  });

  RunOutcome out;
  out.report = metrics::compute_report(w.trace, {}, false);
  auto& extras = out.report.extras;
  extras["messages_per_round"] =
      format_double(static_cast<double>(out.report.sync_messages) /
                    static_cast<double>(std::max<std::uint64_t>(1, rounds)));
  extras["n_agents"] = std::to_string(w.n);
  extras["sync_mode"] = cfg.str("knowledge.sync_mode");

  out.trace = std::move(w.trace);
  out.kernel_trace = w.kernel.trace().render();
  return out;
}

}  // namespace knetsim::scenario
