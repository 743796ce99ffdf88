#include <cmath>
#include <sstream>

#include "knetsim/agent/agent.hpp"
#include "knetsim/agent/planner.hpp"
#include "knetsim/kb/intent.hpp"
#include "knetsim/scenario/engine.hpp"

namespace knetsim::scenario {

namespace {

// Two senders share one capacity-limited link. Each plans its discrete send
// rate against a concave utility plus the dual-priced share of the capacity
// constraint; the governor raises the shared dual from the measured total.
// Decentralised plan/update cycles should settle near the centralized
// constrained optimum.
struct ToyAgent {
  EntityId id = 0;
  agent::WorldModel model;
  std::size_t rate_idx = 0;
  double weight = 1.0;
};

struct ToyWorld {
  sim::Kernel kernel{0};
  metrics::RunTrace trace;
  Mode mode = Mode::FullKraken;

  double capacity = 0.0;
  std::uint32_t levels = 0;
  double max_rate = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t warmup = 0;
  std::uint64_t period = 0;
  bool frozen = false;
  double gamma = 0.95;

  std::vector<ToyAgent> agents;
  std::vector<std::string> actions;
  kb::IntentDescriptor intent;

  std::uint64_t iteration = 0;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double steady_utility_sum = 0.0;
  double steady_usage_sum = 0.0;
  std::uint64_t steady_samples = 0;
  std::vector<std::string> reasoning_log;
};

double rate_of(const ToyWorld& w, std::size_t idx) {
  return w.max_rate * static_cast<double>(idx) / static_cast<double>(w.levels - 1);
}

double utility_of(const ToyWorld& w, const ToyAgent& a, std::size_t idx) {
  return a.weight * std::log1p(rate_of(w, idx));
}

void agent_tick(ToyWorld& w, std::size_t agent_idx) {
  ToyAgent& a = w.agents[agent_idx];

  if (w.iteration < w.levels) {
    // Round-robin exploration: one visit per action suffices, rewards are
    // deterministic.
    a.rate_idx = static_cast<std::size_t>(w.iteration);
  } else {
    std::vector<agent::PlanConstraint> constraints;
    const auto& c = w.intent.constraints.front();
    const double share = c.bound / static_cast<double>(w.agents.size());
    constraints.push_back(
        {c.metric, w.mode == Mode::FullKraken && !w.frozen ? c.lambda : 0.0, share,
         [&w](const std::string&, const std::string& action) {
           const std::size_t idx = static_cast<std::size_t>(
               std::strtoull(action.c_str() + 1, nullptr, 10));
           return rate_of(w, idx);
         }});
    agent::PlannerConfig cfg;
    cfg.gamma = w.gamma;
    cfg.horizon = 1;
    cfg.exact = true;
    const auto result = agent::plan(a.model, "s", w.actions, w.actions, constraints, cfg,
                                    nullptr);
    a.rate_idx = result.candidate_index;

    std::ostringstream line;
    line << w.kernel.now().ticks << "," << a.id << "," << result.action << ","
         << format_double(result.score) << ","
         << format_double(w.intent.constraints.front().lambda);
    w.reasoning_log.push_back(line.str());
  }

  const double reward = utility_of(w, a, a.rate_idx);
  a.model.learn("s", w.actions[a.rate_idx], "s", reward);
  // Rate declaration to the governor; small coordination message.
  w.trace.record_bits(w.kernel.now(), 64, true, true, 0.5, "control");
}

void measure(ToyWorld& w) {
  double usage = 0.0;
  double utility = 0.0;
  for (const auto& a : w.agents) {
    usage += rate_of(w, a.rate_idx);
    utility += utility_of(w, a, a.rate_idx);
  }
  if (w.iteration >= w.warmup) {
    w.trace.constraint_samples.push_back(
        {w.kernel.now(), w.intent.constraints.front().metric, usage});
    w.steady_utility_sum += utility;
    w.steady_usage_sum += usage;
    w.steady_samples += 1;
  }
  if (!w.frozen && w.mode == Mode::FullKraken) {
    kb::update_duals(w.intent, {{w.intent.constraints.front().metric, usage}});
  }
  const double lambda = w.intent.constraints.front().lambda;
  w.lambda_max = std::max(w.lambda_max, lambda);
  w.lambda_min = std::min(w.lambda_min, lambda);
  w.iteration += 1;
}

}  // namespace

RunOutcome run_dual_toy(const ScenarioSpec& spec) {
  const auto& cfg = spec.cfg;
  ToyWorld w;
  w.kernel = sim::Kernel(spec.seed);
  w.mode = spec.mode;
  w.capacity = cfg.f64("dual_toy.capacity");
  w.levels = static_cast<std::uint32_t>(cfg.u64("dual_toy.rate_levels"));
  w.max_rate = cfg.f64("dual_toy.max_rate");
  w.iterations = cfg.u64("dual_toy.iterations");
  w.warmup = cfg.u64("dual_toy.warmup");
  w.period = cfg.u64("duals.update_period_ticks");
  w.frozen = cfg.flag("duals.frozen");
  w.gamma = cfg.f64("agents.gamma");

  for (std::uint32_t i = 0; i < w.levels; ++i) {
    w.actions.push_back("r" + std::to_string(i));
  }
  const double weights[2] = {cfg.f64("dual_toy.w1"), cfg.f64("dual_toy.w2")};
  for (int i = 0; i < 2; ++i) {
    ToyAgent a;
    a.id = w.kernel.register_entity("sender" + std::to_string(i));
    a.model = agent::WorldModel({"s"}, cfg.f64("agents.lambda_smooth"),
                                cfg.u64("agents.memory_capacity"));
    a.weight = weights[i];
    w.agents.push_back(std::move(a));
  }
  w.kernel.register_entity("governor");

  w.intent.id = "shared-link";
  w.intent.objective_terms = {{"total_utility", 1.0}};
  w.intent.constraints.push_back(
      {"total_rate", w.capacity, 0.0, cfg.f64("duals.eta"), 1.0});
  w.intent.validate();

  for (std::uint64_t it = 0; it < w.iterations; ++it) {
    const std::uint64_t tick = (it + 1) * w.period;
    for (std::size_t i = 0; i < w.agents.size(); ++i) {
      w.kernel.schedule({{tick}, 0, w.agents[i].id, sim::EventKind::AgentTick, i, 0});
    }
    w.kernel.schedule({{tick}, 0, 2, sim::EventKind::MetricSample, it, 0});
  }

  w.kernel.run_until(spec.horizon, [&](const sim::Event& ev) {
    if (ev.kind == sim::EventKind::AgentTick) {
      agent_tick(w, static_cast<std::size_t>(ev.arg0));
    } else if (ev.kind == sim::EventKind::MetricSample) {
      measure(w);
    }
  });

  RunOutcome out;
  out.report = metrics::compute_report(w.trace, {w.intent},
                                       cfg.flag("metrics.weighted_distortion"));
  auto& extras = out.report.extras;
  const double steady_n = w.steady_samples > 0 ? static_cast<double>(w.steady_samples) : 1;
  extras["capacity"] = format_double(w.capacity);
  extras["lambda_final"] = format_double(w.intent.constraints.front().lambda);
  extras["lambda_max"] = format_double(w.lambda_max);
  extras["lambda_min"] = format_double(w.lambda_min);
  extras["steady_total_usage"] = format_double(w.steady_usage_sum / steady_n);
  extras["steady_total_utility"] = format_double(w.steady_utility_sum / steady_n);

  out.trace = std::move(w.trace);
  out.kernel_trace = w.kernel.trace().render();
  out.reasoning_log = std::move(w.reasoning_log);
  return out;
}

}  // namespace knetsim::scenario
