#include "modsim/demand.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "modsim/csv.hpp"
#include "modsim/errors.hpp"

namespace modsim {
namespace {

void validate_clusters(const std::vector<DemandCluster>& clusters,
                       std::string_view what) {
  double total = 0.0;
  for (const auto& c : clusters) {
    if (!(c.weight >= 0.0) || !(c.sigma_m >= 0.0) ||
        !std::isfinite(c.center.x) || !std::isfinite(c.center.y)) {
      throw ConfigError(fmt::format(
          "{} cluster needs finite center, sigma >= 0 and weight >= 0", what));
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError(
        fmt::format("{} cluster weights sum to {}, expected 1", what, total));
  }
}

class MixtureSampler {
 public:
  explicit MixtureSampler(const std::vector<DemandCluster>& clusters)
      : clusters_(clusters) {
    std::vector<double> weights;
    for (const auto& c : clusters) weights.push_back(c.weight);
    pick_ = std::discrete_distribution<std::size_t>(weights.begin(),
                                                    weights.end());
  }

  Point draw(std::mt19937_64& rng) {
    const auto& c = clusters_[pick_(rng)];
    if (c.sigma_m == 0.0) return c.center;
    std::normal_distribution<double> noise(0.0, c.sigma_m);
    const double dx = noise(rng);
    const double dy = noise(rng);
    return {c.center.x + dx, c.center.y + dy};
  }

 private:
  const std::vector<DemandCluster>& clusters_;
  std::discrete_distribution<std::size_t> pick_;
};

}  // namespace

void validate(const DemandConfig& config) {
  if (!(config.end > config.start)) {
    throw ConfigError("demand horizon end must be after start");
  }
  if (config.request_count == 0) {
    throw ConfigError("request_count must be positive");
  }
  if (config.origin_clusters.empty()) {
    throw ConfigError("at least one origin cluster is required");
  }
  validate_clusters(config.origin_clusters, "origin");
  if (!config.destination_clusters.empty()) {
    validate_clusters(config.destination_clusters, "destination");
  }
}

void sort_requests(std::vector<TravelRequest>& requests) {
  std::sort(requests.begin(), requests.end(),
            [](const TravelRequest& a, const TravelRequest& b) {
              if (a.announcement_time != b.announcement_time) {
                return a.announcement_time < b.announcement_time;
              }
              return a.id < b.id;
            });
}

LoadedRequests load_requests(std::istream& in, const RoadNetwork& network,
                             std::string_view source_name) {
  LoadedRequests out;
  // An entirely empty file is an empty request list.
  if (in.peek() == std::char_traits<char>::eof()) return out;

  csv::Reader reader(in, std::string(source_name));
  reader.require_columns(
      {"id", "announcement_time_s", "origin_node", "destination_node"});
  while (reader.next()) {
    TravelRequest r;
    r.id = reader.as_int("id");
    r.announcement_time = reader.as_double("announcement_time_s");
    r.origin = reader.as_int("origin_node");
    r.destination = reader.as_int("destination_node");
    for (auto node : {r.origin, r.destination}) {
      if (!network.has_node(node)) {
        throw LoadError(fmt::format("{}: request {}: unknown node {}",
                                    reader.where(), r.id, node));
      }
    }
    if (r.origin == r.destination) {
      ++out.rejected_same_node;
      continue;
    }
    if (!network.reachable(r.origin, r.destination)) {
      throw LoadError(fmt::format(
          "{}: request {}: destination {} unreachable from origin {}",
          reader.where(), r.id, r.destination, r.origin));
    }
    out.requests.push_back(r);
  }
  sort_requests(out.requests);
  return out;
}

LoadedRequests load_requests(const std::filesystem::path& path,
                             const RoadNetwork& network) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  return load_requests(in, network, path.string());
}

void save_requests(std::span<const TravelRequest> requests, std::ostream& out) {
  out << "id,announcement_time_s,origin_node,destination_node\n";
  for (const auto& r : requests) {
    out << fmt::format("{},{},{},{}\n", r.id, r.announcement_time, r.origin,
                       r.destination);
  }
}

void save_requests(std::span<const TravelRequest> requests,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  save_requests(requests, out);
}

std::vector<TravelRequest> generate_demand(const DemandConfig& config,
                                           const RoadNetwork& network) {
  validate(config);
  if (network.node_count() == 0) throw ConfigError("network has no nodes");

  constexpr int kMaxRetries = 1000;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> when(config.start, config.end);
  MixtureSampler origins(config.origin_clusters);
  MixtureSampler destinations(config.destination_clusters.empty()
                                  ? config.origin_clusters
                                  : config.destination_clusters);

  std::vector<TravelRequest> out;
  out.reserve(config.request_count);
  const double spacing = (config.end - config.start) /
                         static_cast<double>(config.request_count);
  for (std::size_t k = 0; k < config.request_count; ++k) {
    TravelRequest r;
    r.announcement_time =
        config.homogeneous
            ? when(rng)
            : config.start + (static_cast<double>(k) + 0.5) * spacing;
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt == kMaxRetries) {
        throw Error(fmt::format(
            "demand generation: no distinct reachable origin/destination "
            "pair after {} draws",
            kMaxRetries));
      }
      r.origin = network.nearest_node(origins.draw(rng));
      r.destination = network.nearest_node(destinations.draw(rng));
      if (r.origin != r.destination &&
          network.reachable(r.origin, r.destination)) {
        break;
      }
    }
    out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const TravelRequest& a, const TravelRequest& b) {
                     return a.announcement_time < b.announcement_time;
                   });
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].id = static_cast<RequestId>(k);
  }
  return out;
}

}  // namespace modsim
