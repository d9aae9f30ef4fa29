// modsim command-line front end.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "modsim/analysis.hpp"
#include "modsim/errors.hpp"
#include "modsim/experiment.hpp"
#include "modsim/trace_io.hpp"

namespace fs = std::filesystem;
using namespace modsim;

namespace {

constexpr int kConfigExit = 1;
constexpr int kRuntimeExit = 2;

struct CommonOptions {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_config = true) {
  auto* c = cmd->add_option("--config", o.config, "Experiment config (JSON)");
  if (needs_config) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Override every seed in the config");
}

ExperimentConfig load(const CommonOptions& o) {
  auto config = load_experiment(o.config);
  if (o.seed) override_seeds(config, *o.seed);
  return config;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

int cmd_simulate(const CommonOptions& o) {
  const auto config = load(o);
  const auto prepared = prepare_experiment(config);
  const fs::path out = o.out;
  const auto trace = run_scenario(prepared.scenario, prepared.network,
                                  prepared.demand, prepared.layout,
                                  prepared.estimator);
  auto artifacts = write_trace(trace, out / "trace", config.trace_format);
  const auto reports = write_reports(trace, prepared.network, out / "reports");
  artifacts.insert(artifacts.end(), reports.begin(), reports.end());
  save_layout(prepared.layout, out / "stations.csv");
  artifacts.push_back(out / "stations.csv");
  write_manifest(make_manifest(config, prepared, artifacts, out),
                 out / "manifest.json");
  fmt::print("{}: {} requests, fleet {}, unserved {}, wrote {}\n",
             to_string(trace.mode), trace.requests.size(), trace.fleet_size,
             trace.unserved, out.string());
  return 0;
}

int cmd_sweep(const CommonOptions& o, const std::vector<double>& q_values) {
  auto config = load(o);
  config.scenario.mode = Mode::mod_rideshare;
  const auto prepared = prepare_experiment(config);
  const fs::path out = o.out;
  auto csv = open_out(out / "sweep.csv");
  csv << "q_max_s,mean_occupancy,vmt_km,status\n";
  bool failed = false;
  for (double q : q_values) {
    auto scenario = prepared.scenario;
    scenario.q_max = q;
    try {
      validate(scenario);
      const auto trace = run_scenario(scenario, prepared.network,
                                      prepared.demand, prepared.layout,
                                      prepared.estimator);
      const auto summary =
          summarize(trace, statistics_window(trace), prepared.network);
      fmt::print(csv, "{},{},{},ok\n", q, summary.mean_occupancy,
                 summary.total_distance_km);
    } catch (const std::exception& e) {
      failed = true;
      fmt::print(csv, "{},,,failed\n", q);
      fmt::print(std::cerr, "q_max {}: {}\n", q, e.what());
    }
  }
  fmt::print("wrote {}\n", (out / "sweep.csv").string());
  return failed ? kRuntimeExit : 0;
}

int cmd_gen_network(const CommonOptions& o) {
  const auto prepared = prepare_experiment(load(o), false);
  const fs::path out = o.out;
  fs::create_directories(out);
  save_network(prepared.network, out / "nodes.csv", out / "segments.csv");
  fmt::print("{} nodes, {} segments\n", prepared.network.node_count(),
             prepared.network.segment_count());
  return 0;
}

int cmd_gen_demand(const CommonOptions& o) {
  const auto prepared = prepare_experiment(load(o), false);
  const fs::path out = o.out;
  fs::create_directories(out);
  save_requests(prepared.demand, out / "requests.csv");
  fmt::print("{} requests\n", prepared.demand.size());
  return 0;
}

int cmd_build_stations(const CommonOptions& o, std::optional<std::size_t> count) {
  auto config = load(o);
  if (count) {
    auto& st = config.document["stations"];
    st.erase("file");
    st["count"] = *count;
  }
  const auto prepared = prepare_experiment(config, false);
  const fs::path out = o.out;
  fs::create_directories(out);
  save_layout(prepared.layout, out / "stations.csv");
  fmt::print("{} stations, mean access time {:.1f} s\n", prepared.layout.size(),
             mean_access_time(prepared.layout, prepared.demand,
                              prepared.network, prepared.estimator));
  return 0;
}

int cmd_calibrate(const CommonOptions& o) {
  const auto prepared = prepare_experiment(load(o), false);
  const fs::path out = o.out;
  fs::create_directories(out);
  save_estimator(prepared.estimator, out / "estimator.json");
  fmt::print("intercept {} s, slope {} s/m, rmse {} s\n",
             prepared.estimator.intercept, prepared.estimator.slope,
             prepared.estimator.calibration_error);
  return 0;
}

int cmd_size_fleet(const CommonOptions& o) {
  const auto prepared = prepare_experiment(load(o), false);
  const auto stocks = size_fleet(prepared.scenario, prepared.network,
                                 prepared.demand, prepared.layout,
                                 prepared.estimator);
  int total = 0;
  for (int s : stocks) total += s;
  nlohmann::ordered_json j;
  j["total"] = total;
  j["stocks"] = stocks;
  open_out(fs::path(o.out) / "fleet.json") << j.dump(2) << '\n';
  fmt::print("fleet size {}\n", total);
  return 0;
}

int cmd_analyze(const CommonOptions& o, const std::string& trace_dir) {
  const auto prepared = prepare_experiment(load(o), false);
  const auto trace = read_trace(trace_dir);
  const auto paths = write_reports(trace, prepared.network, o.out);
  fmt::print("wrote {} reports to {}\n", paths.size(), o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Station-based mobility-on-demand fleet simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommonOptions common;
  std::vector<double> q_values{420, 600, 720, 900};
  std::optional<std::size_t> station_count;
  std::string trace_dir;

  auto* simulate = app.add_subcommand("simulate", "Run one scenario");
  add_common(simulate, common);
  auto* sweep = app.add_subcommand("sweep", "Rideshare runs over q_max values");
  add_common(sweep, common);
  sweep->add_option("--q-max", q_values, "q_max values in seconds")
      ->delimiter(',')
      ->capture_default_str();
  auto* gen_network =
      app.add_subcommand("gen-network", "Write the configured network as CSV");
  add_common(gen_network, common);
  auto* gen_demand = app.add_subcommand("gen-demand", "Write the demand as CSV");
  add_common(gen_demand, common);
  auto* build = app.add_subcommand("build-stations", "k-means station layout");
  add_common(build, common);
  build->add_option("--count", station_count, "Number of stations");
  auto* calibrate = app.add_subcommand("calibrate", "Fit the travel-time estimator");
  add_common(calibrate, common);
  auto* size = app.add_subcommand("size-fleet", "Minimal fleet serving all demand");
  add_common(size, common);
  auto* analyze = app.add_subcommand("analyze", "Recompute reports from a trace");
  add_common(analyze, common);
  analyze->add_option("--trace", trace_dir, "Trace directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*simulate) return cmd_simulate(common);
    if (*sweep) {
      if (q_values.empty()) throw ConfigError("--q-max list is empty");
      return cmd_sweep(common, q_values);
    }
    if (*gen_network) return cmd_gen_network(common);
    if (*gen_demand) return cmd_gen_demand(common);
    if (*build) return cmd_build_stations(common, station_count);
    if (*calibrate) return cmd_calibrate(common);
    if (*size) return cmd_size_fleet(common);
    if (*analyze) return cmd_analyze(common, trace_dir);
  } catch (const ConfigError& e) {
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kConfigExit;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kRuntimeExit;
  }
  return 0;
}
