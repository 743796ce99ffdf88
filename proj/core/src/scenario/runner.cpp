#include "knetsim/scenario/runner.hpp"

#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace knetsim::scenario {

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace

RunArtifacts execute(const config::RunConfig& cfg) {
  const ScenarioSpec spec = build_scenario(cfg);

  const auto wall_start = std::chrono::steady_clock::now();
  RunOutcome outcome = run_scenario(spec);
  const auto wall_end = std::chrono::steady_clock::now();
  const double wall_us = std::chrono::duration<double, std::micro>(wall_end - wall_start).count();

  RunArtifacts artifacts;
  artifacts.report = outcome.report;
  artifacts.report.wall_to_sim =
      spec.horizon.ticks > 0 ? wall_us / static_cast<double>(spec.horizon.ticks) : 0.0;
  artifacts.exit_status = outcome.exit_status;
  artifacts.failure = outcome.failure;

  artifacts.config_echo = cfg.emit();
  artifacts.kernel_trace = std::move(outcome.kernel_trace);
  artifacts.negotiation_log = join_lines(outcome.negotiation_log);
  artifacts.reasoning_log = join_lines(outcome.reasoning_log);
  artifacts.rejection_log = join_lines(outcome.rejection_log);

  std::ostringstream report;
  report << "scenario = " << spec.name << "\n"
         << "mode = " << to_string(spec.mode) << "\n"
         << "seed = " << spec.seed << "\n"
         << "horizon_ticks = " << spec.horizon.ticks << "\n"
         << "status = " << (artifacts.exit_status == 0 ? "ok" : artifacts.failure) << "\n"
         << metrics::render_block(artifacts.report);
  artifacts.report_block = report.str();
  artifacts.report_csv = metrics::render_csv_header(artifacts.report) + "\n" +
                         metrics::render_csv_row(artifacts.report) + "\n";

  std::ostringstream timing;
  timing << "wall_microseconds = " << format_double(wall_us) << "\n"
         << "wall_to_sim = " << format_double(artifacts.report.wall_to_sim) << "\n";
  artifacts.timing = timing.str();
  return artifacts;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error("IoError", "cannot open " + tmp.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw Error("IoError", "short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_artifacts(const RunArtifacts& artifacts, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "config.echo", artifacts.config_echo);
  write_file_atomic(dir / "trace.log", artifacts.kernel_trace);
  write_file_atomic(dir / "negotiation.log", artifacts.negotiation_log);
  write_file_atomic(dir / "reasoning.log", artifacts.reasoning_log);
  write_file_atomic(dir / "rejections.log", artifacts.rejection_log);
  write_file_atomic(dir / "report.txt", artifacts.report_block);
  write_file_atomic(dir / "report.csv", artifacts.report_csv);
  write_file_atomic(dir / "timing.txt", artifacts.timing);
}

namespace {

std::string efficiency_text(const std::optional<double>& eff) {
  return eff.has_value() ? format_double(*eff) : std::string("no-traffic");
}

std::uint64_t extra_u64(const metrics::MetricsReport& report, const std::string& key) {
  auto it = report.extras.find(key);
  if (it == report.extras.end()) return 0;
  return std::strtoull(it->second.c_str(), nullptr, 10);
}

}  // namespace

std::string compare_table(const config::RunConfig& base, const std::string& mode_a,
                          const std::string& mode_b) {
  config::RunConfig cfg_a = base;
  cfg_a.set("mode", mode_a);
  config::RunConfig cfg_b = base;
  cfg_b.set("mode", mode_b);
  const RunArtifacts a = execute(cfg_a);
  const RunArtifacts b = execute(cfg_b);

  std::ostringstream out;
  out << "metric," << mode_a << "," << mode_b << "\n";
  out << "semantic_efficiency," << efficiency_text(a.report.semantic_efficiency) << ","
      << efficiency_text(b.report.semantic_efficiency) << "\n";
  out << "mean_semantic_distortion," << format_double(a.report.mean_semantic_distortion)
      << "," << format_double(b.report.mean_semantic_distortion) << "\n";
  out << "goal_alignment_error," << format_double(a.report.goal_alignment_error) << ","
      << format_double(b.report.goal_alignment_error) << "\n";
  out << "task_success_rate," << format_double(a.report.task_success_rate) << ","
      << format_double(b.report.task_success_rate) << "\n";
  out << "total_bits," << a.report.total_bits << "," << b.report.total_bits << "\n";
  out << "relevant_bits_delivered," << a.report.relevant_bits_delivered << ","
      << b.report.relevant_bits_delivered << "\n";
  out << "sync_messages," << a.report.sync_messages << "," << b.report.sync_messages
      << "\n";
  for (const auto& [key, value] : a.report.extras) {
    auto itb = b.report.extras.find(key);
    out << key << "," << value << "," << (itb == b.report.extras.end() ? "-" : itb->second)
        << "\n";
  }

  // Headline ratios for the bit-accounting comparisons.
  if (a.report.total_bits > 0 && b.report.total_bits > 0) {
    out << "ratio.total_bits_a_over_b,"
        << format_double(static_cast<double>(a.report.total_bits) /
                         static_cast<double>(b.report.total_bits))
        << ",-\n";
    out << "ratio.total_bits_b_over_a,"
        << format_double(static_cast<double>(b.report.total_bits) /
                         static_cast<double>(a.report.total_bits))
        << ",-\n";
  }
  const std::uint64_t uplink_a = extra_u64(a.report, "uplink_bits");
  const std::uint64_t uplink_b = extra_u64(b.report, "uplink_bits");
  if (uplink_a > 0 && uplink_b > 0) {
    out << "ratio.uplink_bits_a_over_b,"
        << format_double(static_cast<double>(uplink_a) / static_cast<double>(uplink_b))
        << ",-\n";
  }
  return out.str();
}

std::vector<SweepRow> run_sweep(const config::RunConfig& base, const std::string& param,
                                const std::vector<std::string>& values,
                                std::size_t workers) {
  std::vector<SweepRow> rows(values.size());
  std::vector<std::thread> pool;
  std::size_t next = 0;
  std::mutex mu;
  const std::size_t thread_count = std::max<std::size_t>(1, std::min(workers, values.size()));
  auto worker = [&]() {
    while (true) {
      std::size_t index;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= values.size()) return;
        index = next++;
      }
      config::RunConfig cfg = base;
      cfg.set(param, values[index]);
      const RunArtifacts artifacts = execute(cfg);
      rows[index] = {values[index], artifacts.report};
    }
  };
  for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return rows;
}

std::string sweep_table(const std::string& param, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  if (rows.empty()) return "";
  out << param << "," << metrics::render_csv_header(rows.front().report) << "\n";
  for (const auto& row : rows) {
    out << row.value << "," << metrics::render_csv_row(row.report) << "\n";
  }

  // Log-log slope of sync messages against the swept value, when the sweep
  // is numeric and at least four points are present.
  std::vector<metrics::ScalingPoint> points;
  for (const auto& row : rows) {
    char* end = nullptr;
    const double v = std::strtod(row.value.c_str(), &end);
    if (end == nullptr || *end != '\0' || v <= 0.0) return out.str();
    if (row.report.sync_messages == 0) return out.str();
    points.push_back({v, static_cast<double>(row.report.sync_messages)});
  }
  if (points.size() >= 4) {
    out << "# scaling_slope(sync_messages vs " << param
        << ") = " << format_double(metrics::scaling_slope(points)) << "\n";
  }
  return out.str();
}

}  // namespace knetsim::scenario
