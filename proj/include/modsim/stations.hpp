#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "modsim/demand.hpp"
#include "modsim/geometry.hpp"
#include "modsim/road_network.hpp"

namespace modsim {

using StationId = std::int64_t;
using VehicleId = std::int64_t;

struct Station {
  StationId id = 0;
  NodeId node = 0;
  Point region_center;
  int initial_stock = 0;
};

struct StationLayout {
  std::vector<Station> stations;

  std::size_t size() const { return stations.size(); }
  bool empty() const { return stations.empty(); }
  int total_stock() const;
  /// Index of the station with the given id; throws std::out_of_range.
  std::size_t index_of(StationId id) const;
};

struct KMeansResult {
  std::vector<Point> centroids;
  std::vector<std::size_t> assignment;  // per point, centroid index
  /// Objective (sum of squared distances) after every assignment step.
  std::vector<double> objective_history;
  std::size_t iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding driven by mt19937_64(seed).
///
/// Seeding rule: the first center is points[uniform_int(0, n-1)]; each next
/// center draws u = uniform_real(0, S) where S is the sum of squared
/// distances to the nearest chosen center, and takes the first point whose
/// running sum exceeds u. Assignment ties go to the lower centroid index; an
/// empty cluster keeps its previous centroid. Stops when assignments are
/// stable or after `max_iterations` updates.
KMeansResult kmeans(std::span<const Point> points, std::size_t k,
                    std::uint64_t seed, std::size_t max_iterations = 100);

/// k-means regions over `points`, one station per region at the network node
/// nearest to the centroid. When two centroids snap to the same node the later
/// one takes its nearest unused node. Stocks are zero.
StationLayout build_stations(std::span<const Point> points, std::size_t n,
                             std::uint64_t seed, const RoadNetwork& network);

/// Origin and destination positions of all requests.
std::vector<Point> demand_points(std::span<const TravelRequest> requests,
                                 const RoadNetwork& network);

/// Station indices sorted by estimated travel time to `node`, ties by id.
std::vector<std::size_t> stations_by_estimated_time(
    const StationLayout& layout, const RoadNetwork& network,
    const TravelTimeEstimator& estimator, NodeId node);

const Station& nearest_station(const StationLayout& layout,
                               const RoadNetwork& network,
                               const TravelTimeEstimator& estimator,
                               NodeId node);

/// Mean estimated time from the nearest station to each request origin.
double mean_access_time(const StationLayout& layout,
                        std::span<const TravelRequest> requests,
                        const RoadNetwork& network,
                        const TravelTimeEstimator& estimator);

/// Share of request origins whose nearest station is each station.
std::vector<double> origin_weights(const StationLayout& layout,
                                   std::span<const TravelRequest> requests,
                                   const RoadNetwork& network,
                                   const TravelTimeEstimator& estimator);

/// Splits `total` proportionally to `weights` (any nonnegative scale),
/// rounding by largest remainder with ties to the lower index. The result
/// sums to `total` exactly.
std::vector<int> apportion_largest_remainder(int total,
                                             std::span<const double> weights);

void save_layout(const StationLayout& layout,
                 const std::filesystem::path& path);
/// Validates station nodes against the network.
StationLayout load_layout(const std::filesystem::path& path,
                          const RoadNetwork& network);

/// Idle vehicles parked at each station, addressed by station index.
class StationDepot {
 public:
  explicit StationDepot(std::size_t station_count = 0)
      : idle_(station_count) {}

  void park(std::size_t station, VehicleId vehicle);
  /// Removes and returns the lowest-id idle vehicle, if any.
  std::optional<VehicleId> take_lowest(std::size_t station);
  /// Removes a specific vehicle; returns false if it was not parked there.
  bool remove(std::size_t station, VehicleId vehicle);

  std::size_t stock(std::size_t station) const { return idle_[station].size(); }
  const std::set<VehicleId>& idle(std::size_t station) const {
    return idle_[station];
  }
  std::size_t station_count() const { return idle_.size(); }
  std::size_t total_idle() const;

 private:
  std::vector<std::set<VehicleId>> idle_;
};

}  // namespace modsim
