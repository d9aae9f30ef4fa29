#include "modsim/experiment.hpp"

#include <array>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "modsim/errors.hpp"
#include "modsim/grid.hpp"

namespace modsim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

const json& require(const json& obj, const char* key, const char* where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(fmt::format("{}: missing '{}'", where, key));
  }
  return obj.at(key);
}

template <class T>
T get(const json& obj, const char* key, const char* where) {
  try {
    return require(obj, key, where).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}.{}: {}", where, key, e.what()));
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const char* where) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return get<T>(obj, key, where);
}

ScenarioConfig parse_scenario(const json& j) {
  constexpr const char* where = "scenario";
  ScenarioConfig c;
  c.mode = parse_mode(get<std::string>(j, "mode", where));
  c.q_max = get_or(j, "q_max_s", c.q_max, where);
  c.start = get_or(j, "start_s", c.start, where);
  c.stat_start = get_or(j, "stat_start_s", c.stat_start, where);
  c.end = get_or(j, "end_s", c.end, where);
  c.rebalancing_period =
      get_or(j, "rebalancing_period_s", c.rebalancing_period, where);
  c.service_time = get_or(j, "service_time_s", c.service_time, where);
  if (j.contains("capacity") && !j.at("capacity").is_null()) {
    c.capacity = get<int>(j, "capacity", where);
  }
  c.occupancy_interval =
      get_or(j, "occupancy_interval_s", c.occupancy_interval, where);
  validate(c);
  return c;
}

GridSpec parse_grid(const json& j) {
  constexpr const char* where = "network.grid";
  GridSpec g;
  g.rows = get_or(j, "rows", g.rows, where);
  g.cols = get_or(j, "cols", g.cols, where);
  g.spacing_m = get_or(j, "spacing_m", g.spacing_m, where);
  g.local_speed_kmh = get_or(j, "local_speed_kmh", g.local_speed_kmh, where);
  g.arterial_every = get_or(j, "arterial_every", g.arterial_every, where);
  g.arterial_speed_kmh =
      get_or(j, "arterial_speed_kmh", g.arterial_speed_kmh, where);
  return g;
}

std::vector<DemandCluster> parse_clusters(const json& j, const char* key) {
  std::vector<DemandCluster> out;
  if (!j.contains(key)) return out;
  for (const auto& c : j.at(key)) {
    constexpr const char* where = "demand.generate cluster";
    out.push_back({{get<double>(c, "x", where), get<double>(c, "y", where)},
                   get<double>(c, "sigma_m", where),
                   get_or(c, "weight", 1.0, where)});
  }
  return out;
}

void check_one_of(const json& section, const char* name,
                  std::initializer_list<const char*> keys) {
  int found = 0;
  for (const char* k : keys) found += section.is_object() && section.contains(k);
  if (found != 1) {
    std::string list;
    for (const char* k : keys) list += list.empty() ? k : std::string("|") + k;
    throw ConfigError(fmt::format("{}: expected exactly one of {}", name, list));
  }
}

}  // namespace

ExperimentConfig parse_experiment(const json& document,
                                  const fs::path& base_dir) {
  if (!document.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig config;
  config.base_dir = base_dir;
  config.document = document;
  config.scenario = parse_scenario(require(document, "scenario", "config"));
  config.trace_format = parse_trace_format(
      get_or<std::string>(document, "trace_format", "csv", "config"));

  const auto& net = require(document, "network", "config");
  if (!net.contains("grid")) {
    require(net, "nodes", "network");
    require(net, "segments", "network");
  }
  check_one_of(require(document, "demand", "config"), "demand",
               {"file", "generate", "commute"});
  if (document.at("demand").contains("commute") && !net.contains("grid")) {
    throw ConfigError("demand.commute requires a grid network");
  }
  const auto& st = require(document, "stations", "config");
  check_one_of(st, "stations", {"file", "count"});
  check_one_of(require(document, "estimator", "config"), "estimator",
               {"file", "samples"});
  const auto& fleet = require(document, "fleet", "config");
  if (fleet.is_string()) {
    if (fleet.get<std::string>() != "auto") {
      throw ConfigError("fleet: expected \"auto\", {stocks} or {total}");
    }
  } else {
    check_one_of(fleet, "fleet", {"stocks", "total"});
  }
  return config;
}

ExperimentConfig load_experiment(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json document;
  try {
    document = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  auto config = parse_experiment(document, path.parent_path());
  config.source = path;
  return config;
}

void override_seeds(ExperimentConfig& config, std::uint64_t seed) {
  auto& d = config.document;
  for (const char* kind : {"generate", "commute"}) {
    if (d["demand"].contains(kind)) d["demand"][kind]["seed"] = seed;
  }
  if (d["stations"].contains("count")) d["stations"]["seed"] = seed;
  if (d["estimator"].contains("samples")) d["estimator"]["seed"] = seed;
}

PreparedExperiment prepare_experiment(const ExperimentConfig& config,
                                      bool apply_fleet) {
  const auto& d = config.document;
  const auto& base = config.base_dir;
  PreparedExperiment p;
  p.scenario = config.scenario;

  const auto& net = d.at("network");
  std::optional<GridSpec> grid;
  if (net.contains("grid")) {
    grid = parse_grid(net.at("grid"));
    p.network = make_grid_network(*grid);
  } else {
    const auto nodes = resolve(base, get<std::string>(net, "nodes", "network"));
    const auto segs =
        resolve(base, get<std::string>(net, "segments", "network"));
    p.network = load_network(nodes, segs);
    p.input_files.push_back(nodes);
    p.input_files.push_back(segs);
  }

  const auto& dem = d.at("demand");
  if (dem.contains("file")) {
    const auto path = resolve(base, get<std::string>(dem, "file", "demand"));
    p.demand = load_requests(path, p.network).requests;
    p.input_files.push_back(path);
  } else if (dem.contains("commute")) {
    const auto& c = dem.at("commute");
    constexpr const char* where = "demand.commute";
    const auto cfg = commute_demand_config(
        *grid, get<std::size_t>(c, "count", where),
        get_or(c, "start_s", p.scenario.start, where),
        get_or(c, "end_s", p.scenario.end, where),
        get_or<std::uint64_t>(c, "seed", 1, where));
    p.seeds["demand"] = cfg.seed;
    p.demand = generate_demand(cfg, p.network);
  } else {
    const auto& g = dem.at("generate");
    constexpr const char* where = "demand.generate";
    DemandConfig cfg;
    cfg.start = get_or(g, "start_s", p.scenario.start, where);
    cfg.end = get_or(g, "end_s", p.scenario.end, where);
    cfg.request_count = get<std::size_t>(g, "count", where);
    cfg.origin_clusters = parse_clusters(g, "origin_clusters");
    cfg.destination_clusters = parse_clusters(g, "destination_clusters");
    cfg.homogeneous = get_or(g, "homogeneous", cfg.homogeneous, where);
    cfg.seed = get_or<std::uint64_t>(g, "seed", cfg.seed, where);
    p.seeds["demand"] = cfg.seed;
    p.demand = generate_demand(cfg, p.network);
  }

  const auto& est = d.at("estimator");
  if (est.contains("file")) {
    const auto path = resolve(base, get<std::string>(est, "file", "estimator"));
    p.estimator = load_estimator(path);
    p.input_files.push_back(path);
  } else {
    const auto seed = get_or<std::uint64_t>(est, "seed", 1, "estimator");
    p.seeds["estimator"] = seed;
    p.estimator = calibrate_estimator(
        p.network, get<std::size_t>(est, "samples", "estimator"), seed);
  }

  const auto& st = d.at("stations");
  if (st.contains("file")) {
    const auto path = resolve(base, get<std::string>(st, "file", "stations"));
    p.layout = load_layout(path, p.network);
    p.input_files.push_back(path);
  } else {
    const auto seed = get_or<std::uint64_t>(st, "seed", 1, "stations");
    p.seeds["stations"] = seed;
    const auto points = demand_points(p.demand, p.network);
    p.layout = build_stations(points, get<std::size_t>(st, "count", "stations"),
                              seed, p.network);
  }

  const auto& fleet = d.at("fleet");
  if (!apply_fleet) return p;
  if (fleet.is_string()) {
    if (p.scenario.mode != Mode::present) {
      p.layout = with_stocks(p.layout, size_fleet(p.scenario, p.network,
                                                  p.demand, p.layout,
                                                  p.estimator));
    }
  } else if (fleet.contains("total")) {
    p.layout = with_stocks(
        p.layout,
        proportional_stocks(get<int>(fleet, "total", "fleet"), p.layout,
                            p.demand, p.network, p.estimator));
  } else {
    const auto stocks = get<std::vector<int>>(fleet, "stocks", "fleet");
    if (stocks.size() != p.layout.size()) {
      throw ConfigError(fmt::format("fleet.stocks has {} entries for {} stations",
                                    stocks.size(), p.layout.size()));
    }
    p.layout = with_stocks(p.layout, stocks);
  }
  return p;
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

RunManifest make_manifest(const ExperimentConfig& config,
                          const PreparedExperiment& prepared,
                          const std::vector<fs::path>& artifacts,
                          const fs::path& artifact_root) {
  RunManifest m;
  // The effective document, so seed overrides change the hash.
  m.config_hash = sha256_hex(config.document.dump());
  for (const auto& f : prepared.input_files) {
    m.input_digests[f.string()] = sha256_file(f);
  }
  m.seeds = prepared.seeds;
  for (const auto& a : artifacts) {
    const auto key = artifact_root.empty() ? a : a.lexically_relative(artifact_root);
    m.artifact_digests[key.generic_string()] = sha256_file(a);
  }
  return m;
}

void write_manifest(const RunManifest& m, const fs::path& path) {
  nlohmann::ordered_json j;
  j["tool_version"] = m.tool_version;
  j["config_hash"] = m.config_hash;
  j["inputs"] = m.input_digests;
  j["seeds"] = m.seeds;
  j["artifacts"] = m.artifact_digests;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace modsim
