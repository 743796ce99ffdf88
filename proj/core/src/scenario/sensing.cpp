#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "knetsim/agent/world_model.hpp"
#include "knetsim/kb/prior.hpp"
#include "knetsim/net/routing.hpp"
#include "knetsim/scenario/engine.hpp"

namespace knetsim::scenario {

namespace {

// Distributed waveform monitoring: sensors learn the periodic structural
// response, flag residual deviations as anomaly events, and (in full mode)
// suppress duplicate reports of an event a peer already published to the
// knowledge plane.
struct AnomalyTruth {
  std::uint64_t start = 0;  // onset tick at the site sensor
  std::uint32_t site = 0;
  bool detected = false;
};

struct Sensor {
  EntityId id = 0;
  agent::WorldModel model;
  // Residual statistics frozen at the end of warm-up.
  std::uint64_t stat_count = 0;
  double stat_mean = 0.0;
  double stat_m2 = 0.0;
  double threshold = 0.0;
  bool threshold_set = false;
  std::string prev_bin;
};

struct SensingWorld {
  sim::Kernel kernel{0};
  metrics::RunTrace trace;
  Policies policies;
  Mode mode = Mode::FullKraken;

  std::uint32_t n = 0;
  std::uint64_t sample_bits = 0;
  std::uint64_t sample_period = 0;
  std::uint64_t event_bits = 0;
  std::uint64_t wave_period = 0;
  std::uint64_t warmup = 0;
  std::uint64_t prop_delay = 0;
  std::uint32_t duration_samples = 0;
  double noise_amp = 0.0;
  double magnitude = 0.0;  // absolute anomaly amplitude
  double attenuation = 0.0;
  double threshold_sigma = 0.0;
  std::uint64_t sync_period = 0;
  std::uint64_t prior_refresh = 0;

  std::vector<Sensor> sensors;
  EntityId gateway = 0;
  EntityId relay_fast = 0;
  EntityId relay_clean = 0;
  EntityId monitor = 0;
  EntityId bridge = 0;  // shared subject for anomaly facts
  net::Topology topo;

  std::map<EntityId, kb::Replica> replicas;
  std::optional<kb::SyncGroup> sync;
  kb::SyncLayout layout;
  kb::PriorModel prior;

  std::vector<AnomalyTruth> anomalies;
  std::uint64_t events_sent = 0;
  std::uint64_t events_suppressed = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t next_object_id = 1;
  std::uint64_t fact_version = 0;
  std::uint64_t prior_version = 0;
};

std::string phase_bin(const SensingWorld& w, std::uint64_t tick) {
  const std::uint64_t bins = std::max<std::uint64_t>(1, w.wave_period / w.sample_period);
  return "p" + std::to_string((tick % w.wave_period) / w.sample_period % bins);
}

double waveform(const SensingWorld& w, std::uint64_t tick) {
  const double phase = static_cast<double>(tick % w.wave_period) /
                       static_cast<double>(w.wave_period);
  return 2.0 * std::sin(2.0 * 3.14159265358979323846 * phase);
}

// Anomaly contribution at `sensor` and `tick`: magnitude decays with hop
// distance from the site and arrives after a per-hop propagation delay.
double anomaly_component(const SensingWorld& w, std::uint32_t sensor, std::uint64_t tick) {
  double total = 0.0;
  for (const auto& a : w.anomalies) {
    const std::uint32_t dist =
        sensor > a.site ? sensor - a.site : a.site - sensor;
    const std::uint64_t onset = a.start + dist * w.prop_delay;
    const std::uint64_t end = onset + w.duration_samples * w.sample_period;
    if (tick >= onset && tick < end) {
      total += w.magnitude * std::pow(w.attenuation, static_cast<double>(dist));
    }
  }
  return total;
}

AnomalyTruth* anomaly_at_site(SensingWorld& w, std::uint32_t sensor, std::uint64_t tick,
                              bool site_only) {
  for (auto& a : w.anomalies) {
    const std::uint32_t dist =
        sensor > a.site ? sensor - a.site : a.site - sensor;
    if (site_only && dist != 0) continue;
    const std::uint64_t onset = a.start + dist * w.prop_delay;
    const std::uint64_t end = onset + w.duration_samples * w.sample_period;
    if (tick >= onset && tick < end) return &a;
  }
  return nullptr;
}

// Predicted backhaul congestion, read from the gateway's replica; absent
// knowledge means zero.
net::CongestionLookup congestion_lookup(SensingWorld& w) {
  return [&w](EntityId src, EntityId dst) {
    for (EntityId node : {src, dst}) {
      const auto fact = w.replicas.at(w.gateway).query_fast(
          node, kb::ObjectKind::ModelSummary, w.kernel.now());
      if (fact.has_value() && fact->payload.tag == "congestion" &&
          !fact->payload.values.empty()) {
        return fact->payload.values.front();
      }
    }
    return 0.0;
  };
}

// Event objects ride the sensor uplink and then the backhaul picked by the
// router: latency-first when data-centric, semantic-fidelity-aware otherwise.
void forward_to_monitor(SensingWorld& w, EntityId from, std::uint64_t bits, double score,
                        bool relevant, const std::string& category) {
  const net::Link* up = w.topo.find_link(from, w.gateway);
  send_message(w.kernel, w.trace, *up, bits, score, relevant, score, w.policies, category,
               w.mode != Mode::DataCentric);

  net::Packet probe;
  probe.size_bits = bits;
  probe.contribution_score = score;
  const auto mode = w.mode == Mode::DataCentric ? net::RouteMode::ShortestLatency
                                                : net::RouteMode::KnowledgeAware;
  const auto path = net::route(probe, w.topo, w.gateway, w.monitor, mode, w.policies.routing,
                               w.policies.protection, congestion_lookup(w));
  for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
    const net::Link* hop = w.topo.find_link(path.nodes[i], path.nodes[i + 1]);
    send_message(w.kernel, w.trace, *hop, bits, score, relevant, score, w.policies,
                 category, w.mode != Mode::DataCentric);
  }
}

void publish_anomaly(SensingWorld& w, Sensor& s, double residual_ratio,
                     std::uint64_t tick) {
  w.fact_version += 1;
  kb::Payload payload;
  payload.tag = "anomaly";
  payload.values = {1.0, static_cast<double>(tick), residual_ratio};
  // Single-sensor detections are tentative: confidence sits below tau_slow
  // so the monitor's fast path stays insufficient and the prior gets
  // consulted (and grounded) against this fact.
  auto fact = kb::make_object(w.next_object_id++, kb::ObjectKind::Fact, w.bridge, payload,
                              0.45, {tick},
                              {tick + w.duration_samples * w.sample_period + 4 * w.prop_delay},
                              s.id, w.fact_version);
  w.replicas.at(s.id).upsert(fact, w.kernel.now());
}

void sample_event(SensingWorld& w, std::uint32_t idx) {
  Sensor& s = w.sensors[idx];
  const std::uint64_t tick = w.kernel.now().ticks;
  auto& rng = w.kernel.entity_rng(s.id);
  const double noise = rng.next_range(-w.noise_amp, w.noise_amp);
  const double clean = waveform(w, tick);
  const double value = clean + noise + anomaly_component(w, idx, tick);
  const std::string bin = phase_bin(w, tick);

  const bool warm = tick >= w.warmup;
  double residual = 0.0;
  bool flagged = false;
  if (s.model.visit_count(bin, "observe") > 0) {
    residual = std::abs(value - s.model.mean_reward(bin, "observe"));
  }
  if (warm && !s.threshold_set) {
    // Freeze the detection threshold on warm-up residual statistics.
    const double mean = s.stat_count > 0 ? s.stat_mean : 0.0;
    const double var = s.stat_count > 1 ? s.stat_m2 / static_cast<double>(s.stat_count - 1)
                                        : 0.0;
    s.threshold = mean + w.threshold_sigma * std::sqrt(var);
    s.threshold_set = true;
  }
  if (warm && s.threshold_set && residual > s.threshold) {
    flagged = true;
  }

  if (!warm) {
    // Residual statistics only once the model has had half the warm-up to
    // settle; early estimates would inflate the threshold.
    if (2 * tick >= w.warmup && s.model.visit_count(bin, "observe") > 0) {
      s.stat_count += 1;
      const double d = residual - s.stat_mean;
      s.stat_mean += d / static_cast<double>(s.stat_count);
      s.stat_m2 += d * (residual - s.stat_mean);
    }
    if (!s.prev_bin.empty()) {
      s.model.learn(s.prev_bin, "observe", bin, value);
    }
    s.prev_bin = bin;
  } else if (!flagged) {
    // Anomalous samples are excluded from the model to keep the learned
    // normal response clean.
    if (!s.prev_bin.empty()) {
      s.model.learn(s.prev_bin, "observe", bin, value);
    }
    s.prev_bin = bin;
  }

  if (w.mode == Mode::DataCentric) {
    AnomalyTruth* truth = anomaly_at_site(w, idx, tick, true);
    const net::Link* up = w.topo.find_link(s.id, w.gateway);
    send_raw_frame(w.kernel, w.trace, *up, w.sample_bits,
                   truth != nullptr ? w.event_bits : 0, "uplink-raw");
    // Backhaul forwarding of the aggregate stream.
    net::Packet probe;
    probe.size_bits = w.sample_bits;
    probe.contribution_score = 0.2;
    const auto path = net::route(probe, w.topo, w.gateway, w.monitor,
                                 net::RouteMode::ShortestLatency, w.policies.routing,
                                 w.policies.protection);
    for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
      const net::Link* hop = w.topo.find_link(path.nodes[i], path.nodes[i + 1]);
      send_raw_frame(w.kernel, w.trace, *hop, w.sample_bits,
                     truth != nullptr ? w.event_bits : 0, "backhaul-raw");
    }
    if (truth != nullptr) {
      // Cloud-side analysis sees everything it needs.
      truth->detected = true;
    }
    return;
  }

  if (!flagged) return;

  AnomalyTruth* truth = anomaly_at_site(w, idx, tick, false);
  if (truth == nullptr) {
    w.false_positives += 1;
  } else {
    truth->detected = true;
  }

  // Knowledge-plane dedup: a fresh anomaly fact for this window means a
  // peer already reported it.
  if (w.mode == Mode::FullKraken) {
    const auto existing = w.replicas.at(s.id).query_fast(w.bridge, kb::ObjectKind::Fact,
                                                         w.kernel.now());
    if (existing.has_value() && existing->payload.tag == "anomaly") {
      w.events_suppressed += 1;
      return;
    }
  }

  const bool relevant = truth != nullptr && truth->site == idx;
  const double ratio = s.threshold > 0.0 ? residual / s.threshold : 1.0;
  forward_to_monitor(w, s.id, w.event_bits, 0.9, relevant, "uplink-event");
  w.events_sent += 1;
  if (w.mode == Mode::FullKraken) {
    publish_anomaly(w, s, ratio, tick);
    // Event-driven propagation: detections are significant state changes.
    w.kernel.schedule({{tick + 1}, 0, w.gateway, sim::EventKind::SyncTrigger, 1, 0});
  }
}

void sync_event(SensingWorld& w) {
  if (w.mode != Mode::FullKraken) return;
  const std::uint64_t tick = w.kernel.now().ticks;
  if (w.prior_refresh > 0 && tick % w.prior_refresh < w.sync_period) {
    w.prior.refresh(w.kernel.now());
  }
  auto observer = [&](EntityId, EntityId, const kb::Delta& delta,
                      const std::vector<kb::UpsertStatus>& statuses) {
    w.trace.record_bits(w.kernel.now(), w.policies.sync_message_bits, false, true, 0.5,
                        "sync");
    w.trace.sync_bits += w.policies.sync_message_bits;
    for (std::size_t i = 0; i < delta.upserts.size(); ++i) {
      const bool novel = statuses[i] == kb::UpsertStatus::Accepted;
      w.trace.record_bits(w.kernel.now(), w.policies.sync_object_bits, novel, true, 0.7,
                          "sync");
      w.trace.sync_bits += w.policies.sync_object_bits;
    }
  };
  w.sync->set_observer(observer);
  const auto report =
      w.sync->sync_round(w.replicas, w.layout, kb::SyncMode::Hierarchical, w.kernel.now());
  w.sync->set_observer({});
  w.trace.sync_messages += report.messages;

  // Monitor-side situation assessment: fast path first, statistical prior
  // only when graph confidence is insufficient, grounded against live facts.
  auto& monitor_replica = w.replicas.at(w.monitor);
  const bool anomalous =
      monitor_replica.query_fast(w.bridge, kb::ObjectKind::Fact, w.kernel.now()).has_value();
  w.prior.observe("segment", anomalous ? "anomalous" : "normal");
  if (!kb::fast_path_sufficient(monitor_replica, w.bridge, kb::ObjectKind::Fact,
                                w.kernel.now(), w.policies.tau_slow)) {
    w.prior_version += 1;
    kb::query_prior(monitor_replica, w.prior, "segment", w.bridge,
                    {{anomalous ? 1.0 : 0.0}, "anomaly"}, w.kernel.now(),
                    {w.policies.delta_ground, {w.sync_period}}, w.next_object_id++,
                    w.prior_version);
  }
}

}  // namespace

RunOutcome run_sensing(const ScenarioSpec& spec) {
  const auto& cfg = spec.cfg;
  SensingWorld w;
  w.kernel = sim::Kernel(spec.seed);
  w.policies = Policies::from(cfg);
  w.mode = spec.mode;
  w.n = static_cast<std::uint32_t>(cfg.u64("sensing.n_sensors"));
  w.sample_bits = cfg.u64("sensing.sample_bits");
  w.sample_period = cfg.u64("sensing.sample_period_ticks");
  w.event_bits = cfg.u64("sensing.event_bits");
  w.wave_period = cfg.u64("sensing.period_ticks");
  w.warmup = cfg.u64("sensing.warmup_ticks");
  w.prop_delay = cfg.u64("sensing.prop_delay_ticks");
  w.duration_samples = static_cast<std::uint32_t>(cfg.u64("sensing.anomaly_duration_samples"));
  w.noise_amp = cfg.f64("sensing.noise_amplitude");
  const double sigma = w.noise_amp / std::sqrt(3.0);  // uniform-noise deviation
  w.magnitude = cfg.f64("sensing.anomaly_magnitude_sigma") * sigma;
  w.attenuation = cfg.f64("sensing.attenuation");
  w.threshold_sigma = cfg.f64("sensing.threshold_sigma");
  w.sync_period = cfg.u64("knowledge.sync_period_ticks");
  w.prior_refresh = cfg.u64("knowledge.prior_refresh_ticks");

  const std::uint64_t bins = std::max<std::uint64_t>(1, w.wave_period / w.sample_period);
  std::vector<std::string> alphabet;
  for (std::uint64_t b = 0; b < bins; ++b) alphabet.push_back("p" + std::to_string(b));

  for (std::uint32_t i = 0; i < w.n; ++i) {
    Sensor s;
    s.id = w.kernel.register_entity("sensor" + std::to_string(i));
    s.model = agent::WorldModel(alphabet, cfg.f64("agents.lambda_smooth"),
                                cfg.u64("agents.memory_capacity"));
    w.sensors.push_back(std::move(s));
  }
  w.gateway = w.kernel.register_entity("gateway");
  w.relay_fast = w.kernel.register_entity("relay-fast");
  w.relay_clean = w.kernel.register_entity("relay-clean");
  w.monitor = w.kernel.register_entity("monitor");
  w.bridge = w.kernel.register_entity("bridge");

  const double fast_loss = cfg.f64("sensing.fast_path_loss");
  const double clean_loss = cfg.f64("sensing.clean_path_loss");
  for (const auto& s : w.sensors) {
    w.topo.add_node({s.id, net::NodeLevel::Edge, 1.0});
    w.topo.add_link({s.id, w.gateway, 10000000, {500}, 0.01});
  }
  w.topo.add_node({w.gateway, net::NodeLevel::BaseStation, 8.0});
  w.topo.add_node({w.relay_fast, net::NodeLevel::BaseStation, 8.0});
  w.topo.add_node({w.relay_clean, net::NodeLevel::BaseStation, 8.0});
  w.topo.add_node({w.monitor, net::NodeLevel::Regional, 64.0});
  w.topo.add_link({w.gateway, w.relay_fast, 100000000, {500}, fast_loss});
  w.topo.add_link({w.relay_fast, w.monitor, 100000000, {500}, fast_loss});
  w.topo.add_link({w.gateway, w.relay_clean, 100000000, {700}, clean_loss});
  w.topo.add_link({w.relay_clean, w.monitor, 100000000, {700}, clean_loss});

  for (const auto& s : w.sensors) {
    w.replicas.emplace(s.id, kb::Replica(s.id));
  }
  w.replicas.emplace(w.gateway, kb::Replica(w.gateway));
  w.replicas.emplace(w.monitor, kb::Replica(w.monitor));

  // Clusters of size k over the sensors, gateway heads, monitor as root.
  const std::uint64_t k = cfg.u64("knowledge.cluster_k");
  kb::Cluster cluster;
  cluster.head = w.gateway;
  for (const auto& s : w.sensors) {
    cluster.members.push_back(s.id);
    if (cluster.members.size() == k) {
      w.layout.clusters.push_back(cluster);
      cluster.members.clear();
    }
  }
  if (!cluster.members.empty()) w.layout.clusters.push_back(cluster);
  w.layout.root = w.monitor;
  // All clusters share the gateway as head; with one physical head the
  // root link still carries cross-cluster consistency.
  w.sync.emplace(w.policies.delta, parse_sync_kinds(cfg.str("knowledge.sync_kinds")));

  const std::uint64_t count = cfg.u64("sensing.anomaly_count");
  const std::uint64_t usable_from = w.warmup + 4 * w.sample_period;
  const std::uint64_t usable_to = spec.horizon.ticks - 8 * w.prop_delay;
  for (std::uint64_t a = 0; a < count; ++a) {
    AnomalyTruth truth;
    truth.start = usable_from + (a + 1) * (usable_to - usable_from) / (count + 1);
    truth.start -= truth.start % w.sample_period;  // align to sampling instants
    truth.site = static_cast<std::uint32_t>(a % w.n);
    w.anomalies.push_back(truth);
  }

  // Historical congestion knowledge about the fast backhaul: steers the
  // knowledge-aware router toward the reliable path.
  w.fact_version += 1;
  auto congestion = kb::make_object(w.next_object_id++, kb::ObjectKind::ModelSummary,
                                    w.relay_fast, {{0.5}, "congestion"}, 0.9, {0},
                                    {spec.horizon.ticks + 1}, w.gateway, w.fact_version);
  w.replicas.at(w.gateway).upsert(congestion, w.kernel.now());

  for (std::uint64_t t = 0; t * w.sample_period < spec.horizon.ticks; ++t) {
    for (std::uint32_t i = 0; i < w.n; ++i) {
      w.kernel.schedule({{t * w.sample_period}, 0, w.sensors[i].id,
                         sim::EventKind::AgentTick, i, 0});
    }
  }
  if (w.mode == Mode::FullKraken) {
    for (std::uint64_t t = w.sync_period; t < spec.horizon.ticks; t += w.sync_period) {
      w.kernel.schedule({{t}, 0, w.gateway, sim::EventKind::SyncTrigger, 0, 0});
    }
  }

  w.kernel.run_until(spec.horizon, [&](const sim::Event& ev) {
    if (ev.kind == sim::EventKind::AgentTick) {
      sample_event(w, static_cast<std::uint32_t>(ev.arg0));
    } else if (ev.kind == sim::EventKind::SyncTrigger) {
      sync_event(w);
    }
  });

  for (const auto& a : w.anomalies) {
    w.trace.task_successes.push_back(a.detected);
  }

  RunOutcome out;
  out.report = metrics::compute_report(w.trace, {}, cfg.flag("metrics.weighted_distortion"));
  const auto detected = static_cast<double>(
      std::count_if(w.anomalies.begin(), w.anomalies.end(),
                    [](const AnomalyTruth& a) { return a.detected; }));
  auto& extras = out.report.extras;
  extras["anomalies"] = std::to_string(w.anomalies.size());
  extras["events_sent"] = std::to_string(w.events_sent);
  extras["events_suppressed"] = std::to_string(w.events_suppressed);
  extras["false_positives"] = std::to_string(w.false_positives);
  extras["recall"] = w.anomalies.empty()
                         ? "-"
                         : format_double(detected / static_cast<double>(w.anomalies.size()));
  const double precision =
      w.events_sent + w.false_positives == 0
          ? 1.0
          : 1.0 - static_cast<double>(w.false_positives) /
                      static_cast<double>(w.events_sent + w.false_positives);
  extras["precision"] = format_double(precision);
  extras["sizes.event_bits"] = std::to_string(w.event_bits);
  extras["sizes.sample_bits"] = std::to_string(w.sample_bits);

  out.trace = std::move(w.trace);
  out.kernel_trace = w.kernel.trace().render();
  for (const auto& [id, replica] : w.replicas) {
    for (const auto& rec : replica.rejections()) {
      out.rejection_log.push_back(std::to_string(rec.tick.ticks) + "," +
                                  std::to_string(rec.subject) + "," +
                                  std::string(kb::to_string(rec.kind)) + "," + rec.reason);
    }
  }
  return out;
}

}  // namespace knetsim::scenario
