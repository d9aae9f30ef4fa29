#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "modsim/geometry.hpp"
#include "modsim/road_network.hpp"

namespace modsim {

using RequestId = std::int64_t;

struct TravelRequest {
  RequestId id = 0;
  double announcement_time = 0.0;  // seconds from the simulation epoch
  NodeId origin = 0;
  NodeId destination = 0;

  friend bool operator==(const TravelRequest&, const TravelRequest&) = default;
};

/// One Gaussian component of a spatial mixture.
struct DemandCluster {
  Point center;
  double sigma_m = 0.0;
  double weight = 1.0;
};

struct DemandConfig {
  double start = 0.0;
  double end = 3600.0;
  std::size_t request_count = 0;
  std::vector<DemandCluster> origin_clusters;
  /// Empty means destinations use the origin mixture.
  std::vector<DemandCluster> destination_clusters;
  /// true: i.i.d. uniform announcement times over [start, end).
  /// false: evenly spaced deterministic times.
  bool homogeneous = true;
  std::uint64_t seed = 1;
};

/// Throws ConfigError when the config violates its invariants.
void validate(const DemandConfig& config);

struct LoadedRequests {
  std::vector<TravelRequest> requests;
  /// Rows dropped because origin == destination.
  std::size_t rejected_same_node = 0;
};

/// Reads `id,announcement_time_s,origin_node,destination_node`. The result
/// is sorted by announcement time, ties by id.
LoadedRequests load_requests(std::istream& in, const RoadNetwork& network,
                             std::string_view source_name = "requests");
LoadedRequests load_requests(const std::filesystem::path& path,
                             const RoadNetwork& network);

void save_requests(std::span<const TravelRequest> requests, std::ostream& out);
void save_requests(std::span<const TravelRequest> requests,
                   const std::filesystem::path& path);

/// Synthetic demand: positions drawn from the cluster mixtures and snapped
/// to the nearest node, announcement times over the horizon. Ids are
/// assigned 0..n-1 in announcement order. Deterministic in `config.seed`.
std::vector<TravelRequest> generate_demand(const DemandConfig& config,
                                           const RoadNetwork& network);

void sort_requests(std::vector<TravelRequest>& requests);

}  // namespace modsim
