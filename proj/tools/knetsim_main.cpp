// Command-line front end: single runs, paired mode comparisons, parameter
// sweeps and config validation over the simulator library.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "knetsim/config/config.hpp"
#include "knetsim/scenario/runner.hpp"

namespace {

using knetsim::Error;
using knetsim::config::RunConfig;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CommonArgs {
  std::string config_path;
  std::string seed;
  std::string mode;
  std::string out_dir;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "config file (key = value lines)");
  cmd->add_option("--seed", args.seed, "seed override");
  cmd->add_option("--mode", args.mode, "mode override")
      ->check(CLI::IsMember({"data-centric", "semantic", "full-kraken"}));
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--set", args.overrides, "KEY=VALUE override, repeatable");
}

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg = args.config_path.empty()
                      ? RunConfig::defaults()
                      : RunConfig::parse(read_file(args.config_path));
  if (!args.seed.empty()) cfg.set("seed", args.seed);
  if (!args.mode.empty()) cfg.set("mode", args.mode);
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw Error("InvalidValue", "--set expects KEY=VALUE, got '" + kv + "'");
    }
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

std::filesystem::path resolve_out_dir(const CommonArgs& args, const RunConfig& cfg,
                                      const std::string& default_name) {
  if (!args.out_dir.empty()) return args.out_dir;
  if (!cfg.str("out_dir").empty()) return cfg.str("out_dir");
  if (const char* env = std::getenv("KNETSIM_OUT"); env != nullptr && *env != '\0') {
    return std::filesystem::path(env) / default_name;
  }
  return std::filesystem::path("out") / default_name;
}

std::string run_name(const RunConfig& cfg) {
  return cfg.str("scenario") + "-" + cfg.str("mode") + "-s" + cfg.str("seed");
}

int cmd_run(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const auto artifacts = knetsim::scenario::execute(cfg);
  const auto dir = resolve_out_dir(args, cfg, run_name(cfg));
  knetsim::scenario::write_artifacts(artifacts, dir);
  std::cout << artifacts.report_block;
  std::cout << "artifacts = " << dir.string() << "\n";
  if (artifacts.exit_status != 0) {
    std::cerr << "run failed: " << artifacts.failure << "\n";
  }
  return artifacts.exit_status;
}

int cmd_compare(const CommonArgs& args, const std::string& mode_a,
                const std::string& mode_b) {
  RunConfig cfg = load_config(args);
  const std::string table = knetsim::scenario::compare_table(cfg, mode_a, mode_b);
  std::cout << table;
  const auto dir = resolve_out_dir(args, cfg, run_name(cfg) + "-compare");
  std::filesystem::create_directories(dir);
  knetsim::scenario::write_file_atomic(dir / "compare.csv", table);
  return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& param, const std::string& values,
              std::size_t workers) {
  RunConfig cfg = load_config(args);
  std::vector<std::string> value_list;
  std::size_t start = 0;
  while (start <= values.size()) {
    const auto comma = values.find(',', start);
    value_list.push_back(values.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (value_list.empty()) throw Error("InvalidValue", "--values is empty");

  const auto rows = knetsim::scenario::run_sweep(cfg, param, value_list, workers);
  const std::string table = knetsim::scenario::sweep_table(param, rows);
  std::cout << table;
  const auto dir = resolve_out_dir(args, cfg, run_name(cfg) + "-sweep");
  std::filesystem::create_directories(dir);
  knetsim::scenario::write_file_atomic(dir / "sweep.csv", table);
  return 0;
}

int cmd_validate(const CommonArgs& args, bool print_effective) {
  const RunConfig cfg = load_config(args);
  if (print_effective) {
    std::cout << cfg.emit();
  } else {
    std::cout << "config ok\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge-centric network management simulator"};
  app.require_subcommand(1);

  CommonArgs run_args, compare_args, sweep_args, validate_args;
  std::string mode_a = "semantic";
  std::string mode_b = "data-centric";
  std::string sweep_param;
  std::string sweep_values;
  std::size_t sweep_workers = 4;
  bool print_effective = false;

  auto* run = app.add_subcommand("run", "execute one scenario and write artifacts");
  add_common(run, run_args);

  auto* compare = app.add_subcommand("compare", "run two modes on the same seed");
  add_common(compare, compare_args);
  compare->add_option("--mode-a", mode_a, "first mode")
      ->check(CLI::IsMember({"data-centric", "semantic", "full-kraken"}));
  compare->add_option("--mode-b", mode_b, "second mode")
      ->check(CLI::IsMember({"data-centric", "semantic", "full-kraken"}));

  auto* sweep = app.add_subcommand("sweep", "run a config across parameter values");
  add_common(sweep, sweep_args);
  sweep->add_option("--param", sweep_param, "config key to sweep")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();
  sweep->add_option("--workers", sweep_workers, "concurrent runs");

  auto* validate = app.add_subcommand("validate-config", "parse and validate a config");
  add_common(validate, validate_args);
  validate->add_flag("--print-effective", print_effective,
                     "echo the effective configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (compare->parsed()) return cmd_compare(compare_args, mode_a, mode_b);
    if (sweep->parsed()) return cmd_sweep(sweep_args, sweep_param, sweep_values, sweep_workers);
    if (validate->parsed()) return cmd_validate(validate_args, print_effective);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
