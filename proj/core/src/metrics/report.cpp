#include "knetsim/metrics/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace knetsim::metrics {

void RunTrace::record_bits(sim::SimTime tick, std::uint64_t bits, bool relevant,
                           bool delivered, double weight, std::string category) {
  transmissions.push_back({tick, bits, relevant, delivered, weight, std::move(category)});
}

std::optional<double> semantic_efficiency(const RunTrace& trace) {
  std::uint64_t total = 0;
  std::uint64_t relevant_delivered = 0;
  for (const auto& tx : trace.transmissions) {
    total += tx.bits;
    if (tx.relevant && tx.delivered) relevant_delivered += tx.bits;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(relevant_delivered) / static_cast<double>(total);
}

double goal_alignment_error(const RunTrace& trace,
                            const std::vector<kb::IntentDescriptor>& intents) {
  // Weighted violation summed across constraints per sample tick, then
  // averaged over sample ticks.
  std::map<std::uint64_t, double> per_tick;
  for (const auto& sample : trace.constraint_samples) {
    for (const auto& intent : intents) {
      const kb::Constraint* c = intent.find_constraint(sample.metric);
      if (c == nullptr) continue;
      per_tick[sample.tick.ticks] += c->weight * std::max(0.0, sample.value - c->bound);
    }
  }
  if (per_tick.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [tick, v] : per_tick) sum += v;
  return sum / static_cast<double>(per_tick.size());
}

double mean_distortion(const RunTrace& trace, bool weighted) {
  if (trace.distortions.empty()) return 0.0;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < trace.distortions.size(); ++i) {
    const double w =
        weighted && i < trace.distortion_weights.size() ? trace.distortion_weights[i] : 1.0;
    num += w * trace.distortions[i];
    den += w;
  }
  return den == 0.0 ? 0.0 : num / den;
}

MetricsReport compute_report(const RunTrace& trace,
                             const std::vector<kb::IntentDescriptor>& intents,
                             bool weighted_distortion) {
  MetricsReport report;
  report.semantic_efficiency = semantic_efficiency(trace);
  report.mean_semantic_distortion = mean_distortion(trace, weighted_distortion);
  report.goal_alignment_error = goal_alignment_error(trace, intents);

  if (!trace.task_successes.empty()) {
    const auto ok = static_cast<double>(
        std::count(trace.task_successes.begin(), trace.task_successes.end(), true));
    report.task_success_rate = ok / static_cast<double>(trace.task_successes.size());
  }
  for (const auto& rec : trace.negotiations) {
    report.negotiation_rounds[rec.rounds] += 1;
  }
  report.sync_messages = trace.sync_messages;
  for (const auto& tx : trace.transmissions) {
    report.total_bits += tx.bits;
    if (tx.relevant && tx.delivered) report.relevant_bits_delivered += tx.bits;
  }
  return report;
}

double scaling_slope(const std::vector<ScalingPoint>& points) {
  if (points.size() < 4) {
    throw Error("InsufficientPoints",
                "scaling regression needs >= 4 points, got " + std::to_string(points.size()));
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto n = static_cast<double>(points.size());
  for (const auto& p : points) {
    const double x = std::log(p.n);
    const double y = std::log(p.messages);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

std::string efficiency_string(const std::optional<double>& eff) {
  return eff.has_value() ? format_double(*eff) : std::string("no-traffic");
}

std::string rounds_histogram_string(const std::map<std::uint32_t, std::uint64_t>& hist) {
  std::string out;
  for (const auto& [rounds, count] : hist) {
    if (!out.empty()) out += ' ';
    out += std::to_string(rounds) + ":" + std::to_string(count);
  }
  return out.empty() ? "-" : out;
}

}  // namespace

std::string render_block(const MetricsReport& report) {
  std::ostringstream out;
  out << "semantic_efficiency = " << efficiency_string(report.semantic_efficiency) << "\n"
      << "mean_semantic_distortion = " << format_double(report.mean_semantic_distortion)
      << "\n"
      << "goal_alignment_error = " << format_double(report.goal_alignment_error) << "\n"
      << "task_success_rate = " << format_double(report.task_success_rate) << "\n"
      << "negotiation_rounds = " << rounds_histogram_string(report.negotiation_rounds)
      << "\n"
      << "sync_messages = " << report.sync_messages << "\n"
      << "total_bits = " << report.total_bits << "\n"
      << "relevant_bits_delivered = " << report.relevant_bits_delivered << "\n";
  for (const auto& [key, value] : report.extras) {
    out << key << " = " << value << "\n";
  }
  return out.str();
}

std::string render_csv_header(const MetricsReport& report) {
  std::string out =
      "semantic_efficiency,mean_semantic_distortion,goal_alignment_error,"
      "task_success_rate,sync_messages,total_bits,relevant_bits_delivered";
  for (const auto& [key, value] : report.extras) {
    out += ',';
    out += key;
  }
  return out;
}

std::string render_csv_row(const MetricsReport& report) {
  std::string out = efficiency_string(report.semantic_efficiency);
  out += ',' + format_double(report.mean_semantic_distortion);
  out += ',' + format_double(report.goal_alignment_error);
  out += ',' + format_double(report.task_success_rate);
  out += ',' + std::to_string(report.sync_messages);
  out += ',' + std::to_string(report.total_bits);
  out += ',' + std::to_string(report.relevant_bits_delivered);
  for (const auto& [key, value] : report.extras) {
    out += ',';
    out += value;
  }
  return out;
}

}  // namespace knetsim::metrics
