#include "knetsim/config/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace knetsim::config {

namespace {

std::vector<KeyInfo> build_schema() {
  std::vector<KeyInfo> keys;
  auto u64 = [&](std::string key, std::string def, double min, double max, std::string doc) {
    keys.push_back({std::move(key), KeyType::U64, std::move(def), min, max, {}, std::move(doc)});
  };
  auto f64 = [&](std::string key, std::string def, double min, double max, std::string doc) {
    keys.push_back({std::move(key), KeyType::F64, std::move(def), min, max, {}, std::move(doc)});
  };
  auto flag = [&](std::string key, std::string def, std::string doc) {
    keys.push_back({std::move(key), KeyType::Bool, std::move(def), 0, 0, {}, std::move(doc)});
  };
  auto choice = [&](std::string key, std::string def, std::vector<std::string> choices,
                    std::string doc) {
    keys.push_back({std::move(key), KeyType::Enum, std::move(def), 0, 0, std::move(choices),
                    std::move(doc)});
  };

  choice("scenario", "intersection",
         {"intersection", "xr", "sensing", "dual-toy", "sync-stress"}, "scenario to run");
  choice("mode", "full-kraken", {"data-centric", "semantic", "full-kraken"},
         "run mode: raw streaming, semantic messaging, or all planes");
  u64("seed", "1", 0, 1e19, "master seed for all RNG streams");
  u64("horizon_ticks", "0", 0, 1e12, "simulated microseconds; 0 = scenario default");
  keys.push_back({"out_dir", KeyType::Str, "", 0, 0, {}, "artifact directory"});

  // Infrastructure plane.
  f64("infra.theta_lo", "0.3", 0, 1, "contribution score below which protection is light");
  f64("infra.theta_hi", "0.7", 0, 1, "contribution score at or above which protection is strong");
  f64("infra.protection.light.loss_mult", "1.0", 0, 10, "loss multiplier, light tier");
  f64("infra.protection.light.cap_mult", "1.0", 0.1, 10, "airtime multiplier, light tier");
  f64("infra.protection.standard.loss_mult", "0.5", 0, 10, "loss multiplier, standard tier");
  f64("infra.protection.standard.cap_mult", "1.2", 0.1, 10, "airtime multiplier, standard tier");
  f64("infra.protection.strong.loss_mult", "0.2", 0, 10, "loss multiplier, strong tier");
  f64("infra.protection.strong.cap_mult", "1.5", 0.1, 10, "airtime multiplier, strong tier");
  f64("infra.urgency_epsilon", "0.1", 1e-6, 1, "urgency floor for far deadlines");
  u64("infra.deadline_window_ticks", "100000", 1, 1e12, "urgency normalisation window");
  f64("infra.route.alpha", "1.0", 0, 1e6, "routing weight on normalised latency");
  f64("infra.route.beta", "1.0", 0, 1e6, "routing weight on semantic loss");
  f64("infra.route.gamma", "1.0", 0, 1e6, "routing weight on predicted congestion");
  f64("infra.route.latency_norm_ticks", "1000", 1, 1e9, "latency normaliser");
  f64("infra.retransmit.rho_initial", "0.1", 0, 1, "first retransmit score threshold");
  f64("infra.retransmit.rho_step", "0.2", 0, 1, "threshold increase per attempt");
  f64("infra.retransmit.rho_cap", "0.9", 0, 1, "threshold ceiling");
  u64("infra.retransmit.max_attempts", "4", 1, 64, "transmission attempts per packet");

  // Knowledge plane.
  f64("knowledge.theta_div.fact", "0.0", 0, 1, "delta significance threshold for facts");
  f64("knowledge.theta_div.model_summary", "0.1", 0, 1,
      "delta significance threshold for model summaries");
  f64("knowledge.tau_slow", "0.5", 0, 1, "fast-path confidence below which the prior is consulted");
  f64("knowledge.delta_ground", "0.5", 0, 1, "max payload distance to a fact before rejection");
  u64("knowledge.prior_refresh_ticks", "1000000", 1, 1e12, "offline prior refresh interval");
  u64("knowledge.history_limit", "256", 1, 1e6, "superseded objects retained per replica");
  keys.push_back({"knowledge.sync_kinds", KeyType::Str, "facts,intentions", 0, 0, {},
                  "comma list of globally synced kinds"});
  u64("knowledge.cluster_k", "4", 1, 1024, "agents per sync cluster");
  choice("knowledge.sync_mode", "hierarchical", {"flat", "hierarchical"},
         "delta synchronisation topology");
  u64("knowledge.sync_period_ticks", "10000", 1, 1e12, "sync round cadence");
  u64("knowledge.sync_message_bits", "256", 1, 1e9, "per sync message framing bits");
  u64("knowledge.sync_object_bits", "512", 1, 1e9, "bits per object carried in a delta");

  // Agent plane.
  f64("agents.gamma", "0.95", 0, 1, "rollout discount");
  f64("agents.lambda_smooth", "0.1", 0, 100, "Laplace smoothing for transition counts");
  u64("agents.memory_capacity", "1024", 1, 1e7, "transition memory FIFO size");
  u64("agents.planner_rollouts", "16", 1, 1e5, "K sampled rollouts per candidate");
  u64("agents.planner_horizon", "3", 1, 64, "H planning steps");
  flag("agents.planner_exact", "false", "exact enumeration instead of sampling");

  // Goal governance.
  f64("duals.eta", "0.05", 1e-9, 100, "dual ascent step");
  u64("duals.update_period_ticks", "10000", 1, 1e12, "dual update cadence");
  flag("duals.frozen", "false", "freeze duals at their initial value (baseline mode)");

  // Negotiation.
  u64("negotiation.r_max", "8", 1, 64, "round bound before escalation");
  u64("negotiation.round_latency_ticks", "10000", 1, 1e9, "simulated cost per round");
  u64("negotiation.message_bits", "256", 1, 1e9, "bits per proposal message");
  u64("negotiation.concession_spread", "3", 1, 64, "slots a conceder randomises over");
  flag("negotiation.hold_allowed", "true", "allow one-step holds when replanning fails");

  // Metrics.
  flag("metrics.weighted_distortion", "false", "weight distortion by semantic weight");
  u64("metrics.sample_period_ticks", "1000", 1, 1e12, "constraint sampling cadence");

  // Intersection scenario.
  u64("intersection.n_vehicles", "4", 2, 8, "vehicles crossing per episode");
  u64("intersection.episodes", "10", 1, 1e4, "crossing waves per run");
  u64("intersection.frame_bits", "1000000", 1, 1e12, "raw sensor frame bits per tick");
  u64("intersection.intention_bits", "1000", 1, 1e9, "bits per trajectory intention");
  u64("intersection.beacon_bits", "1000", 1, 1e9, "bits per serialized-mode position beacon");
  u64("intersection.arm_cells", "3", 1, 16, "approach cells per arm");
  u64("intersection.step_ticks", "1000", 1, 1e9, "ticks per grid step");
  u64("intersection.max_delay", "16", 1, 256, "largest entry delay a vehicle may pick");
  u64("intersection.deadline_steps", "48", 1, 1024, "crossing deadline in steps");
  f64("intersection.link_loss", "0.02", 0, 0.5, "uplink base loss probability");
  f64("intersection.duals.conflict_bound", "0.0", 0, 1e6,
      "intent bound on first-proposal conflicts per episode");
  f64("intersection.duals.eta", "0.5", 1e-9, 100, "dual step for the conflict constraint");
  u64("intersection.warmup_episodes", "4", 0, 1e4,
      "episodes before constraint sampling starts");

  // XR scenario.
  u64("xr.frame_bits", "20000", 1, 1e12, "raw frame bits per rendered frame");
  u64("xr.frame_period_ticks", "10000", 1, 1e9, "render frame cadence");
  u64("xr.descriptor_bits", "2000", 1, 1e9, "bits for the initial scene descriptor");
  u64("xr.delta_bits", "1000", 1, 1e9, "bits per pose/gaze delta");
  u64("xr.gaze_keys", "8", 2, 64, "gaze state alphabet size");
  u64("xr.gaze_period_ticks", "20000", 1, 1e9, "ticks between gaze moves");
  f64("xr.jitter_prob", "0.0", 0, 1, "chance a gaze move deviates from the cycle");
  u64("xr.descriptor_refresh_frames", "50", 1, 1e9,
      "frames between descriptor re-sends when no knowledge plane holds the scene");
  u64("xr.prior_min_observations", "3", 1, 1e6, "observations before the prior serves");
  f64("xr.link_loss", "0.0", 0, 0.5, "headset link base loss probability");
  u64("xr.link_latency_ticks", "0", 0, 1e9,
      "one-way link latency, reported as motion-to-photon delay");

  // Sensing scenario.
  u64("sensing.n_sensors", "8", 2, 16, "sensor agents");
  u64("sensing.sample_bits", "1024", 1, 1e9, "bits per raw waveform sample message");
  u64("sensing.sample_period_ticks", "400", 1, 1e9, "sampling cadence");
  u64("sensing.event_bits", "2048", 1, 1e9, "bits per anomaly event object");
  u64("sensing.anomaly_count", "8", 0, 1e4, "anomalies injected after warm-up");
  f64("sensing.anomaly_magnitude_sigma", "5.0", 0, 100, "anomaly size in noise sigmas");
  u64("sensing.anomaly_duration_samples", "2", 1, 1e4, "samples an anomaly persists");
  f64("sensing.attenuation", "0.95", 0, 1, "per-hop anomaly magnitude decay");
  u64("sensing.prop_delay_ticks", "30000", 0, 1e9, "anomaly travel time between sensors");
  f64("sensing.noise_amplitude", "1.0", 1e-9, 1e6, "uniform noise half-range");
  u64("sensing.warmup_ticks", "200000", 0, 1e12, "model warm-up before detection");
  u64("sensing.period_ticks", "4000", 2, 1e9, "waveform period");
  f64("sensing.threshold_sigma", "4.0", 0.1, 100, "detection threshold in residual sigmas");
  f64("sensing.fast_path_loss", "0.05", 0, 0.5, "loss on the low-latency backhaul");
  f64("sensing.clean_path_loss", "0.001", 0, 0.5, "loss on the reliable backhaul");

  // Dual-decomposition toy scenario.
  f64("dual_toy.capacity", "10.0", 0, 1e6, "shared link capacity");
  u64("dual_toy.rate_levels", "21", 2, 1e4, "discrete send-rate choices per agent");
  f64("dual_toy.max_rate", "10.0", 0.01, 1e6, "largest selectable rate");
  f64("dual_toy.w1", "1.0", 0.01, 100, "utility weight, agent 1");
  f64("dual_toy.w2", "1.2", 0.01, 100, "utility weight, agent 2");
  u64("dual_toy.iterations", "400", 1, 1e6, "plan/update cycles");
  u64("dual_toy.warmup", "100", 0, 1e6, "cycles excluded from steady-state stats");

  // Sync scaling probe.
  u64("sync_stress.n_agents", "8", 2, 256, "replicas in the sweep");
  u64("sync_stress.rounds", "1", 1, 1e4, "all-dirty rounds measured");

  return keys;
}

void check_value(const KeyInfo& info, const std::string& value) {
  auto fail = [&](const std::string& why) {
    throw Error("InvalidValue", "key '" + info.key + "': " + why);
  };
  switch (info.type) {
    case KeyType::Str:
      return;
    case KeyType::Enum: {
      if (std::find(info.choices.begin(), info.choices.end(), value) == info.choices.end()) {
        std::string allowed;
        for (const auto& c : info.choices) allowed += (allowed.empty() ? "" : "|") + c;
        fail("'" + value + "' not one of {" + allowed + "}");
      }
      return;
    }
    case KeyType::Bool: {
      if (value != "true" && value != "false") fail("expected true or false");
      return;
    }
    case KeyType::U64: {
      if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
        fail("expected a non-negative integer, got '" + value + "'");
      }
      errno = 0;
      const double v = std::strtod(value.c_str(), nullptr);
      if (v < info.min || v > info.max) {
        fail("value " + value + " outside [" + format_double(info.min) + ", " +
             format_double(info.max) + "]");
      }
      return;
    }
    case KeyType::F64: {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(value.c_str(), &end);
      if (value.empty() || end == nullptr || *end != '\0' || errno != 0 || !std::isfinite(v)) {
        fail("expected a finite number, got '" + value + "'");
      }
      if (v < info.min || v > info.max) {
        fail("value " + value + " outside [" + format_double(info.min) + ", " +
             format_double(info.max) + "]");
      }
      return;
    }
  }
}

}  // namespace

const std::vector<KeyInfo>& schema() {
  static const std::vector<KeyInfo> keys = build_schema();
  return keys;
}

const KeyInfo* find_key(const std::string& key) {
  for (const auto& info : schema()) {
    if (info.key == key) return &info;
  }
  return nullptr;
}

RunConfig RunConfig::defaults() {
  RunConfig cfg;
  for (const auto& info : schema()) {
    cfg.values_[info.key] = info.default_value;
  }
  return cfg;
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg = defaults();
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    const std::string stripped = strip(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw Error("ParseError",
                  "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = strip(stripped.substr(0, eq));
    const std::string value = strip(stripped.substr(eq + 1));
    if (key.empty()) {
      throw Error("ParseError", "line " + std::to_string(line_no) + ": empty key");
    }
    try {
      cfg.set(key, value);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const KeyInfo* info = find_key(key);
  if (info == nullptr) {
    throw Error("UnknownKey", "no such config key '" + key + "'");
  }
  check_value(*info, value);
  values_[key] = value;
}

const std::string& RunConfig::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("UnknownKey", "no such config key '" + key + "'");
  return it->second;
}

std::uint64_t RunConfig::u64(const std::string& key) const {
  return std::strtoull(str(key).c_str(), nullptr, 10);
}

double RunConfig::f64(const std::string& key) const {
  return std::strtod(str(key).c_str(), nullptr);
}

bool RunConfig::flag(const std::string& key) const {
  return str(key) == "true";
}

void RunConfig::validate() const {
  if (!(f64("infra.theta_lo") < f64("infra.theta_hi"))) {
    throw Error("InvalidValue", "infra.theta_lo must be below infra.theta_hi");
  }
  const double l = f64("infra.protection.light.loss_mult");
  const double s = f64("infra.protection.standard.loss_mult");
  const double g = f64("infra.protection.strong.loss_mult");
  if (!(g < s && s < l)) {
    throw Error("InvalidValue", "protection loss multipliers must decrease with tier");
  }
  const double lc = f64("infra.protection.light.cap_mult");
  const double sc = f64("infra.protection.standard.cap_mult");
  const double gc = f64("infra.protection.strong.cap_mult");
  if (!(gc > sc && sc > lc)) {
    throw Error("InvalidValue", "protection capacity costs must increase with tier");
  }
  if (u64("dual_toy.warmup") >= u64("dual_toy.iterations")) {
    throw Error("InvalidValue", "dual_toy.warmup must be below dual_toy.iterations");
  }
  std::string kinds = str("knowledge.sync_kinds");
  std::size_t start = 0;
  while (start <= kinds.size()) {
    const auto comma = kinds.find(',', start);
    const std::string kind = kinds.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (kind != "facts" && kind != "intentions" && kind != "experiences" &&
        kind != "model-summaries" && kind != "reasoning-traces" && !kind.empty()) {
      throw Error("InvalidValue", "unknown knowledge kind '" + kind + "' in sync_kinds");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
}

std::string RunConfig::emit() const {
  std::string out;
  for (const auto& [key, value] : values_) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

}  // namespace knetsim::config
