#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "modsim/demand.hpp"
#include "modsim/road_network.hpp"
#include "modsim/sim_engine.hpp"
#include "modsim/stations.hpp"
#include "modsim/trace_io.hpp"

namespace modsim {

inline constexpr const char* kToolVersion = "0.1.0";

/// Parsed experiment configuration. Relative paths are resolved against the
/// directory of the config file.
///
///   network:   {nodes, segments} | {grid: {rows, cols, spacing_m, ...}}
///   demand:    {file} | {generate: {...}} | {commute: {count, start_s,
///              end_s, seed}}  (commute requires a grid network)
///   stations:  {file} | {count, seed}
///   estimator: {file} | {samples, seed}
///   scenario:  ScenarioConfig fields with _s suffixes for times
///   fleet:     {stocks: [...]} | {total: N} | "auto"
///   trace_format: "csv" | "jsonl"
struct ExperimentConfig {
  std::filesystem::path source;    // config file, empty when built in memory
  std::filesystem::path base_dir;  // relative input paths resolve here
  nlohmann::json document;
  ScenarioConfig scenario;
  TraceFormat trace_format = TraceFormat::csv;
};

/// Throws ConfigError on missing or malformed fields.
ExperimentConfig parse_experiment(const nlohmann::json& document,
                                  const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Replaces every seed in the document (demand, stations, estimator).
void override_seeds(ExperimentConfig& config, std::uint64_t seed);

/// Fully materialised inputs of one experiment.
struct PreparedExperiment {
  RoadNetwork network;
  std::vector<TravelRequest> demand;
  StationLayout layout;  // with stocks applied
  TravelTimeEstimator estimator;
  ScenarioConfig scenario;
  std::map<std::string, std::uint64_t> seeds;
  std::vector<std::filesystem::path> input_files;
};

/// Builds or loads network, demand, stations and estimator, and applies the
/// fleet specification unless `apply_fleet` is false. "auto" fleets run
/// size_fleet.
PreparedExperiment prepare_experiment(const ExperimentConfig& config,
                                      bool apply_fleet = true);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string config_hash;
  std::map<std::string, std::string> input_digests;     // path -> sha256
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> artifact_digests;  // relative path -> sha256
};

RunManifest make_manifest(const ExperimentConfig& config,
                          const PreparedExperiment& prepared,
                          const std::vector<std::filesystem::path>& artifacts,
                          const std::filesystem::path& artifact_root = {});
void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path);

}  // namespace modsim
