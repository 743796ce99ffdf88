#include <optional>
#include <sstream>

#include "knetsim/agent/quantizer.hpp"
#include "knetsim/kb/prior.hpp"
#include "knetsim/scenario/engine.hpp"

namespace knetsim::scenario {

namespace {

// Distributed rendering pair: the headset abstracts its pose/gaze into state
// keys and ships scene deltas; the edge server reconstructs the view. In
// full mode a shared statistical prior anticipates the next gaze key and
// correct predictions suppress the delta entirely.
struct XrWorld {
  sim::Kernel kernel{0};
  metrics::RunTrace trace;
  Policies policies;
  Mode mode = Mode::FullKraken;

  std::uint64_t frame_bits = 0;
  std::uint64_t frame_period = 0;
  std::uint64_t descriptor_bits = 0;
  std::uint64_t delta_bits = 0;
  std::uint32_t gaze_key_count = 0;
  std::uint64_t gaze_period = 0;
  std::uint64_t prior_refresh = 0;
  std::uint64_t prior_min_obs = 0;
  std::uint64_t sync_period = 0;

  EntityId headset = 0;
  EntityId server = 0;
  EntityId scene = 0;  // subject id for the static scene fact
  net::Link uplink;
  net::Link downlink;

  std::map<EntityId, kb::Replica> replicas;
  std::optional<kb::SyncGroup> sync;
  kb::SyncLayout layout;
  kb::PriorModel prior;  // shared: both ends learn from the same stream
  agent::GridQuantizer gaze_grid{{{0.0, 1.0, 1}}};

  std::vector<std::uint32_t> gaze_schedule;  // true key per gaze step
  std::uint32_t last_sent_key = 0;
  bool descriptor_sent = false;
  std::uint64_t descriptor_refresh_frames = 0;
  std::uint64_t frame_index = 0;
  std::uint32_t server_rendered = 0;
  bool server_has_state = false;

  std::uint64_t deltas_sent = 0;
  std::uint64_t deltas_suppressed = 0;
  std::uint64_t prior_hits = 0;
  std::uint64_t prior_misses = 0;
  std::uint64_t next_object_id = 1;
  std::uint64_t experience_version = 0;
  std::vector<std::string> reasoning_log;
};

std::uint32_t true_key_at(const XrWorld& w, std::uint64_t tick) {
  const std::uint64_t step = tick / w.gaze_period;
  return w.gaze_schedule[static_cast<std::size_t>(
      std::min<std::uint64_t>(step, w.gaze_schedule.size() - 1))];
}

void frame_event(XrWorld& w) {
  const std::uint64_t tick = w.kernel.now().ticks;
  const std::uint32_t truth = true_key_at(w, tick);
  w.frame_index += 1;

  // Perception: continuous gaze angle quantised to the key alphabet.
  auto& rng = w.kernel.entity_rng(w.headset);
  const double raw = static_cast<double>(truth) + 0.5 + rng.next_range(-0.4, 0.4);
  auto [state, distortion] = w.gaze_grid.perceive(w.headset, {raw}, w.kernel.now());
  w.trace.distortions.push_back(distortion);
  w.trace.distortion_weights.push_back(0.9);

  if (w.mode == Mode::DataCentric) {
    const bool changed = !w.server_has_state || truth != w.server_rendered;
    send_raw_frame(w.kernel, w.trace, w.uplink, w.frame_bits,
                   changed ? w.delta_bits : 0, "uplink-raw");
    // Frames carry everything; the server re-detects the scene each frame.
    w.server_rendered = truth;
    w.server_has_state = true;
  } else {
    if (!w.descriptor_sent) {
      const auto sent = send_message(w.kernel, w.trace, w.uplink, w.descriptor_bits, 0.9,
                                     true, 0.9, w.policies, "uplink-descriptor", true);
      w.descriptor_sent = true;
      if (sent.delivered) {
        w.server_rendered = truth;
        w.server_has_state = true;
        w.last_sent_key = truth;
      }
      // Scene geometry is static knowledge; it lives in the plane rather
      // than being re-streamed.
      auto scene_fact = kb::make_object(w.next_object_id++, kb::ObjectKind::Fact, w.scene,
                                        {{1.0}, "scene"}, 1.0, w.kernel.now(),
                                        {w.kernel.now().ticks + 100000000}, w.headset, 1);
      w.replicas.at(w.headset).upsert(scene_fact, w.kernel.now());
    } else if (w.mode == Mode::Semantic && w.descriptor_refresh_frames > 0 &&
               w.frame_index % w.descriptor_refresh_frames == 0) {
      // Without a knowledge plane the server holds no durable scene state;
      // the descriptor must be refreshed periodically. An unchanged scene
      // makes the refresh pure redundancy.
      send_message(w.kernel, w.trace, w.uplink, w.descriptor_bits, 0.9, false, 0.9,
                   w.policies, "uplink-descriptor", true);
    }
    if (w.descriptor_sent && truth != w.last_sent_key) {
      const std::string context = "k" + std::to_string(w.last_sent_key);
      const std::string outcome = "k" + std::to_string(truth);
      bool suppress = false;
      if (w.mode == Mode::FullKraken && w.prior.observation_count() >= w.prior_min_obs) {
        const auto prediction = w.prior.predict(context);
        if (prediction.has_value()) {
          suppress = prediction->outcome == outcome;
          if (suppress) {
            w.prior_hits += 1;
          } else {
            w.prior_misses += 1;
          }
        }
      }
      if (suppress) {
        // The server runs the identical prior and reconstructs the key at
        // zero transmitted bits; the prediction lands in its replica as a
        // grounded model-summary object.
        w.deltas_suppressed += 1;
        auto derived = kb::query_prior(w.replicas.at(w.server), w.prior, context,
                                       w.headset, {{}, ""}, w.kernel.now(),
                                       {0.5, {w.gaze_period * 2}}, w.next_object_id++,
                                       w.deltas_suppressed);
        if (!derived.empty()) {
          w.server_rendered = truth;
        }
      } else {
        const auto sent = send_message(w.kernel, w.trace, w.uplink, w.delta_bits, 0.9,
                                       true, 0.9, w.policies, "uplink-delta", true);
        w.deltas_sent += 1;
        if (sent.delivered) w.server_rendered = truth;
      }
      if (w.mode == Mode::FullKraken) {
        w.prior.observe(context, outcome);
      }
      w.last_sent_key = truth;

      // Local experience record of the realised transition.
      w.experience_version += 1;
      auto exp = kb::make_object(
          w.next_object_id++, kb::ObjectKind::Experience, w.headset,
          {{static_cast<double>(truth)}, "gaze"}, 1.0, w.kernel.now(),
          {w.kernel.now().ticks + 2 * w.gaze_period}, w.headset, w.experience_version);
      w.replicas.at(w.headset).upsert(exp, w.kernel.now());
    }
  }

  const bool match = w.server_has_state && w.server_rendered == truth;
  w.trace.task_successes.push_back(match);
}

void sync_event(XrWorld& w) {
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
}

}  // namespace

RunOutcome run_xr(const ScenarioSpec& spec) {
  const auto& cfg = spec.cfg;
  XrWorld w;
  w.kernel = sim::Kernel(spec.seed);
  w.policies = Policies::from(cfg);
  w.mode = spec.mode;
  w.frame_bits = cfg.u64("xr.frame_bits");
  w.frame_period = cfg.u64("xr.frame_period_ticks");
  w.descriptor_bits = cfg.u64("xr.descriptor_bits");
  w.delta_bits = cfg.u64("xr.delta_bits");
  w.gaze_key_count = static_cast<std::uint32_t>(cfg.u64("xr.gaze_keys"));
  w.gaze_period = cfg.u64("xr.gaze_period_ticks");
  w.prior_refresh = cfg.u64("knowledge.prior_refresh_ticks");
  w.prior_min_obs = cfg.u64("xr.prior_min_observations");
  w.sync_period = cfg.u64("knowledge.sync_period_ticks");
  w.descriptor_refresh_frames = cfg.u64("xr.descriptor_refresh_frames");

  w.headset = w.kernel.register_entity("headset");
  w.server = w.kernel.register_entity("edge-server");
  w.scene = w.kernel.register_entity("scene");

  const double loss = cfg.f64("xr.link_loss");
  const std::uint64_t latency = cfg.u64("xr.link_latency_ticks");
  w.uplink = {w.headset, w.server, 100000000, {latency}, loss};
  w.downlink = {w.server, w.headset, 100000000, {latency}, loss};

  w.replicas.emplace(w.headset, kb::Replica(w.headset));
  w.replicas.emplace(w.server, kb::Replica(w.server));
  kb::Cluster cluster;
  cluster.head = w.server;
  cluster.members.push_back(w.headset);
  w.layout.clusters.push_back(cluster);
  w.sync.emplace(w.policies.delta, parse_sync_kinds(cfg.str("knowledge.sync_kinds")));

  w.gaze_grid = agent::GridQuantizer(
      {{0.0, static_cast<double>(w.gaze_key_count), w.gaze_key_count}});

  // Gaze schedule: a deterministic cycle with optional jitter, drawn once so
  // every mode replays the identical trajectory for a given seed.
  const double jitter = cfg.f64("xr.jitter_prob");
  auto& gaze_rng = w.kernel.rng("gaze-schedule");
  const std::uint64_t steps = spec.horizon.ticks / w.gaze_period + 2;
  std::uint32_t key = 0;
  for (std::uint64_t i = 0; i < steps; ++i) {
    w.gaze_schedule.push_back(key);
    if (jitter > 0.0 && gaze_rng.next_bernoulli(jitter)) {
      key = static_cast<std::uint32_t>(gaze_rng.next_below(w.gaze_key_count));
    } else {
      key = (key + 1) % w.gaze_key_count;
    }
  }

  for (std::uint64_t t = 0; t * w.frame_period < spec.horizon.ticks; ++t) {
    w.kernel.schedule({{t * w.frame_period}, 0, w.headset, sim::EventKind::AgentTick, t, 0});
  }
  if (w.mode == Mode::FullKraken) {
    for (std::uint64_t t = w.sync_period; t < spec.horizon.ticks; t += w.sync_period) {
      w.kernel.schedule({{t}, 0, w.server, sim::EventKind::SyncTrigger, 0, 0});
    }
  }

  w.kernel.run_until(spec.horizon, [&](const sim::Event& ev) {
    if (ev.kind == sim::EventKind::AgentTick) {
      frame_event(w);
    } else if (ev.kind == sim::EventKind::SyncTrigger) {
      sync_event(w);
    }
  });

  RunOutcome out;
  out.report = metrics::compute_report(w.trace, {}, cfg.flag("metrics.weighted_distortion"));
  auto& extras = out.report.extras;
  extras["deltas_sent"] = std::to_string(w.deltas_sent);
  extras["deltas_suppressed"] = std::to_string(w.deltas_suppressed);
  extras["match_rate"] = format_double(out.report.task_success_rate);
  extras["motion_to_photon_ticks"] = std::to_string(latency);
  const std::uint64_t prior_total = w.prior_hits + w.prior_misses;
  extras["prior_hit_rate"] =
      prior_total == 0 ? "-" : format_double(static_cast<double>(w.prior_hits) /
                                             static_cast<double>(prior_total));
  extras["sizes.delta_bits"] = std::to_string(w.delta_bits);
  extras["sizes.descriptor_bits"] = std::to_string(w.descriptor_bits);
  extras["sizes.frame_bits"] = std::to_string(w.frame_bits);

  out.trace = std::move(w.trace);
  out.kernel_trace = w.kernel.trace().render();
  out.reasoning_log = std::move(w.reasoning_log);
  for (const auto& [id, replica] : w.replicas) {
    for (const auto& rec : replica.rejections()) {
      out.rejection_log.push_back(std::to_string(rec.tick.ticks) + "," +
                                  std::to_string(rec.subject) + "," +
                                  std::string(kb::to_string(rec.kind)) + "," + rec.reason);
    }
  }
  if (out.report.task_success_rate < 0.99 && spec.mode != Mode::DataCentric) {
    out.exit_status = 2;
    out.failure = "envelope:render-consistency";
  }
  return out;
}

}  // namespace knetsim::scenario
