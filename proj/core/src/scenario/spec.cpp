#include "knetsim/scenario/spec.hpp"

#include <algorithm>

namespace knetsim::scenario {

Mode mode_from(const std::string& name) {
  if (name == "data-centric") return Mode::DataCentric;
  if (name == "semantic") return Mode::Semantic;
  if (name == "full-kraken") return Mode::FullKraken;
  throw Error("InvalidValue", "unknown mode '" + name + "'");
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::DataCentric: return "data-centric";
    case Mode::Semantic: return "semantic";
    case Mode::FullKraken: return "full-kraken";
  }
  return "unknown";
}

Policies Policies::from(const config::RunConfig& cfg) {
  Policies p;
  p.protection.theta_lo = cfg.f64("infra.theta_lo");
  p.protection.theta_hi = cfg.f64("infra.theta_hi");
  p.protection.light = {net::ProtectionTier::Light,
                        cfg.f64("infra.protection.light.loss_mult"),
                        cfg.f64("infra.protection.light.cap_mult")};
  p.protection.standard = {net::ProtectionTier::Standard,
                           cfg.f64("infra.protection.standard.loss_mult"),
                           cfg.f64("infra.protection.standard.cap_mult")};
  p.protection.strong = {net::ProtectionTier::Strong,
                         cfg.f64("infra.protection.strong.loss_mult"),
                         cfg.f64("infra.protection.strong.cap_mult")};
  p.protection.validate();
  p.retransmit.rho_initial = cfg.f64("infra.retransmit.rho_initial");
  p.retransmit.rho_step = cfg.f64("infra.retransmit.rho_step");
  p.retransmit.rho_cap = cfg.f64("infra.retransmit.rho_cap");
  p.retransmit.max_attempts = static_cast<std::uint32_t>(cfg.u64("infra.retransmit.max_attempts"));
  p.scheduler.urgency_epsilon = cfg.f64("infra.urgency_epsilon");
  p.scheduler.deadline_window = {cfg.u64("infra.deadline_window_ticks")};
  p.routing.alpha = cfg.f64("infra.route.alpha");
  p.routing.beta = cfg.f64("infra.route.beta");
  p.routing.gamma = cfg.f64("infra.route.gamma");
  p.routing.latency_norm_ticks = cfg.f64("infra.route.latency_norm_ticks");
  p.delta.fact = cfg.f64("knowledge.theta_div.fact");
  p.delta.model_summary = cfg.f64("knowledge.theta_div.model_summary");
  p.tau_slow = cfg.f64("knowledge.tau_slow");
  p.delta_ground = cfg.f64("knowledge.delta_ground");
  p.sync_message_bits = cfg.u64("knowledge.sync_message_bits");
  p.sync_object_bits = cfg.u64("knowledge.sync_object_bits");
  return p;
}

std::vector<kb::ObjectKind> parse_sync_kinds(const std::string& csv) {
  std::vector<kb::ObjectKind> kinds;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto comma = csv.find(',', start);
    const std::string kind =
        csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (kind == "facts") kinds.push_back(kb::ObjectKind::Fact);
    else if (kind == "intentions") kinds.push_back(kb::ObjectKind::Intention);
    else if (kind == "experiences") kinds.push_back(kb::ObjectKind::Experience);
    else if (kind == "model-summaries") kinds.push_back(kb::ObjectKind::ModelSummary);
    else if (kind == "reasoning-traces") kinds.push_back(kb::ObjectKind::ReasoningTrace);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return kinds;
}

namespace {

ScenarioSpec base_spec(const config::RunConfig& cfg, std::string name,
                       std::uint64_t default_horizon) {
  cfg.validate();
  ScenarioSpec spec;
  spec.name = std::move(name);
  spec.mode = mode_from(cfg.str("mode"));
  spec.seed = cfg.u64("seed");
  const std::uint64_t configured = cfg.u64("horizon_ticks");
  spec.horizon = {configured == 0 ? default_horizon : configured};
  spec.cfg = cfg;
  return spec;
}

}  // namespace

ScenarioSpec build_intersection(const config::RunConfig& cfg) {
  const std::uint64_t n = cfg.u64("intersection.n_vehicles");
  if (n < 2 || n > 8) {
    throw Error("InvalidCount", "intersection supports 2..8 vehicles, got " + std::to_string(n));
  }
  const std::uint64_t episodes = cfg.u64("intersection.episodes");
  const std::uint64_t step_ticks = cfg.u64("intersection.step_ticks");
  const std::uint64_t steps = cfg.u64("intersection.deadline_steps") + 16;
  const std::uint64_t nego_budget =
      cfg.u64("negotiation.round_latency_ticks") * (cfg.u64("negotiation.r_max") + 2);
  const std::uint64_t per_episode = steps * step_ticks + nego_budget;
  return base_spec(cfg, "intersection", episodes * per_episode + step_ticks);
}

ScenarioSpec build_xr(const config::RunConfig& cfg) {
  return base_spec(cfg, "xr", 4000000);
}

ScenarioSpec build_sensing(const config::RunConfig& cfg) {
  const std::uint64_t n = cfg.u64("sensing.n_sensors");
  if (n < 2 || n > 16) {
    throw Error("InvalidCount", "sensing supports 2..16 sensors, got " + std::to_string(n));
  }
  return base_spec(cfg, "sensing", 2400000);
}

ScenarioSpec build_dual_toy(const config::RunConfig& cfg) {
  const std::uint64_t iterations = cfg.u64("dual_toy.iterations");
  return base_spec(cfg, "dual-toy", (iterations + 2) * cfg.u64("duals.update_period_ticks"));
}

ScenarioSpec build_sync_stress(const config::RunConfig& cfg) {
  const std::uint64_t rounds = cfg.u64("sync_stress.rounds");
  return base_spec(cfg, "sync-stress",
                   (rounds + 2) * cfg.u64("knowledge.sync_period_ticks"));
}

ScenarioSpec build_scenario(const config::RunConfig& cfg) {
  const std::string& name = cfg.str("scenario");
  if (name == "intersection") return build_intersection(cfg);
  if (name == "xr") return build_xr(cfg);
  if (name == "sensing") return build_sensing(cfg);
  if (name == "dual-toy") return build_dual_toy(cfg);
  if (name == "sync-stress") return build_sync_stress(cfg);
  throw Error("InvalidValue", "unknown scenario '" + name + "'");
}

SendOutcome send_message(sim::Kernel& kernel, metrics::RunTrace& trace,
                         const net::Link& link, std::uint64_t payload_bits,
                         double contribution_score, bool relevant, double semantic_weight,
                         const Policies& policies, const std::string& category,
                         bool protected_transport) {
  net::Packet packet;
  packet.size_bits = payload_bits;
  packet.contribution_score = contribution_score;
  packet.relevance_flag = relevant;
  packet.protection = protected_transport
                          ? net::select_protection(packet, policies.protection)
                          : policies.protection.light;

  const double loss = net::effective_loss(link, packet.protection);
  const std::uint64_t airtime = net::effective_size_bits(packet);
  auto& rng = kernel.rng("link:" + std::to_string(link.src) + "-" + std::to_string(link.dst));

  SendOutcome outcome;
  while (true) {
    outcome.attempts += 1;
    const bool delivered = !rng.next_bernoulli(loss);
    trace.record_bits(kernel.now(), airtime, relevant, delivered, semantic_weight, category);
    if (delivered) {
      outcome.delivered = true;
      return outcome;
    }
    if (!net::retransmit_decision(packet, outcome.attempts, policies.retransmit)) {
      return outcome;
    }
  }
}

void send_raw_frame(sim::Kernel& kernel, metrics::RunTrace& trace, const net::Link& link,
                    std::uint64_t frame_bits, std::uint64_t novel_bits,
                    const std::string& category) {
  auto& rng = kernel.rng("link:" + std::to_string(link.src) + "-" + std::to_string(link.dst));
  const bool delivered = !rng.next_bernoulli(link.base_loss);
  const std::uint64_t novel = std::min(novel_bits, frame_bits);
  if (novel > 0) {
    trace.record_bits(kernel.now(), novel, true, delivered, 0.5, category);
  }
  trace.record_bits(kernel.now(), frame_bits - novel, false, delivered, 0.5, category);
}

}  // namespace knetsim::scenario
