#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "knetsim/kb/intent.hpp"
#include "knetsim/sim/time.hpp"

namespace knetsim::metrics {

// One link-level transmission attempt. `delivered` is false for losses; bits
// count toward the total either way. Negotiation and sync messages are
// recorded here too, so overhead lands in every efficiency denominator.
struct Transmission {
  sim::SimTime tick{};
  std::uint64_t bits = 0;
  bool relevant = false;  // task-utility proxy flag (scenario ground truth)
  bool delivered = false;
  double semantic_weight = 0.5;
  std::string category;  // raw, descriptor, intention, beacon, negotiation, sync, ...
};

struct ConstraintSample {
  sim::SimTime tick{};
  std::string metric;
  double value = 0.0;
};

struct NegotiationRecord {
  std::uint64_t session = 0;
  std::uint32_t rounds = 0;
  bool converged = false;
  sim::SimTime delay{};
};

// Everything the metrics are computed from. Pure data; recomputation over
// the same trace yields identical values.
struct RunTrace {
  std::vector<Transmission> transmissions;
  std::vector<double> distortions;
  std::vector<double> distortion_weights;
  std::vector<ConstraintSample> constraint_samples;
  std::vector<NegotiationRecord> negotiations;
  std::uint64_t sync_messages = 0;
  std::uint64_t sync_bits = 0;
  std::vector<bool> task_successes;
  std::uint64_t envelope_violations = 0;

  void record_bits(sim::SimTime tick, std::uint64_t bits, bool relevant, bool delivered,
                   double weight, std::string category);
};

struct MetricsReport {
  std::optional<double> semantic_efficiency;  // nullopt marks no-traffic
  double mean_semantic_distortion = 0.0;
  double goal_alignment_error = 0.0;
  double task_success_rate = 0.0;
  std::map<std::uint32_t, std::uint64_t> negotiation_rounds;  // rounds -> sessions
  std::uint64_t sync_messages = 0;
  std::uint64_t total_bits = 0;
  std::uint64_t relevant_bits_delivered = 0;
  double wall_to_sim = 0.0;  // reported in the timing sidecar, not the report file
  std::map<std::string, std::string> extras;  // scenario-specific key-values
};

// Fraction of task-relevant bits delivered over everything transmitted,
// coordination overhead included. nullopt when nothing was transmitted.
std::optional<double> semantic_efficiency(const RunTrace& trace);

// Time-averaged weighted constraint violation against the intents in force.
double goal_alignment_error(const RunTrace& trace,
                            const std::vector<kb::IntentDescriptor>& intents);

// Distortion averaged per perception event; optionally weighted.
double mean_distortion(const RunTrace& trace, bool weighted);

MetricsReport compute_report(const RunTrace& trace,
                             const std::vector<kb::IntentDescriptor>& intents,
                             bool weighted_distortion = false);

struct ScalingPoint {
  double n = 0.0;
  double messages = 0.0;
};

// Least-squares slope of log(messages) against log(n). Requires at least
// four points; throws Error("InsufficientPoints") otherwise.
double scaling_slope(const std::vector<ScalingPoint>& points);

// Deterministic renderings: a human-readable key-value block and a flat
// comma-separated row (with header) for sweeps.
std::string render_block(const MetricsReport& report);
std::string render_csv_header(const MetricsReport& report);
std::string render_csv_row(const MetricsReport& report);

}  // namespace knetsim::metrics
