#include "modsim/stations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>

#include "modsim/csv.hpp"
#include "modsim/errors.hpp"

namespace modsim {
namespace {

std::size_t closest_centroid(const Point& p, std::span<const Point> centroids) {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d2 = squared_distance(p, centroids[c]);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = c;
    }
  }
  return best;
}

double objective(std::span<const Point> points, std::span<const Point> centroids,
                 std::span<const std::size_t> assignment) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    total += squared_distance(points[i], centroids[assignment[i]]);
  }
  return total;
}

}  // namespace

int StationLayout::total_stock() const {
  int total = 0;
  for (const auto& s : stations) total += s.initial_stock;
  return total;
}

std::size_t StationLayout::index_of(StationId id) const {
  for (std::size_t i = 0; i < stations.size(); ++i) {
    if (stations[i].id == id) return i;
  }
  throw std::out_of_range(fmt::format("unknown station {}", id));
}

KMeansResult kmeans(std::span<const Point> points, std::size_t k,
                    std::uint64_t seed, std::size_t max_iterations) {
  if (k == 0) throw ConfigError("k-means needs at least one cluster");
  if (k > points.size()) {
    throw ConfigError(fmt::format(
        "cannot build {} regions from {} points", k, points.size()));
  }
  const auto n = points.size();
  std::mt19937_64 rng(seed);

  KMeansResult result;
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  result.centroids.push_back(points[first(rng)]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d2[i] = squared_distance(points[i], result.centroids[0]);
  }
  while (result.centroids.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      const double target = u(rng);
      double running = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        running += d2[i];
        if (running > target) {
          pick = i;
          break;
        }
      }
    }
    result.centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], points[pick]));
    }
  }

  result.assignment.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    result.assignment[i] = closest_centroid(points[i], result.centroids);
  }
  result.objective_history.push_back(
      objective(points, result.centroids, result.assignment));

  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    std::vector<Point> sum(k);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[result.assignment[i]].x += points[i].x;
      sum[result.assignment[i]].y += points[i].y;
      ++count[result.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] == 0) continue;
      const auto m = static_cast<double>(count[c]);
      result.centroids[c] = {sum[c].x / m, sum[c].y / m};
    }
    ++result.iterations;

    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = closest_centroid(points[i], result.centroids);
      if (c != result.assignment[i]) {
        result.assignment[i] = c;
        changed = true;
      }
    }
    result.objective_history.push_back(
        objective(points, result.centroids, result.assignment));
    if (!changed) break;
  }
  return result;
}

StationLayout build_stations(std::span<const Point> points, std::size_t n,
                             std::uint64_t seed, const RoadNetwork& network) {
  if (n > network.node_count()) {
    throw ConfigError(fmt::format("{} stations need at least {} network nodes",
                                  n, n));
  }
  const auto clusters = kmeans(points, n, seed);
  StationLayout layout;
  std::unordered_set<NodeId> used;
  for (std::size_t c = 0; c < n; ++c) {
    const auto& center = clusters.centroids[c];
    NodeId node = network.nearest_node(center);
    if (used.contains(node)) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& candidate : network.nodes()) {
        if (used.contains(candidate.id)) continue;
        const double d2 = squared_distance(center, candidate.position);
        if (d2 < best || (d2 == best && candidate.id < node)) {
          best = d2;
          node = candidate.id;
        }
      }
    }
    used.insert(node);
    layout.stations.push_back(
        Station{static_cast<StationId>(c), node, center, 0});
  }
  return layout;
}

std::vector<Point> demand_points(std::span<const TravelRequest> requests,
                                 const RoadNetwork& network) {
  std::vector<Point> points;
  points.reserve(2 * requests.size());
  for (const auto& r : requests) {
    points.push_back(network.position(r.origin));
    points.push_back(network.position(r.destination));
  }
  return points;
}

std::vector<std::size_t> stations_by_estimated_time(
    const StationLayout& layout, const RoadNetwork& network,
    const TravelTimeEstimator& estimator, NodeId node) {
  const auto& target = network.position(node);
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    keyed.emplace_back(
        estimator.estimate(network.position(layout.stations[i].node), target),
        i);
  }
  std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return layout.stations[a.second].id < layout.stations[b.second].id;
  });
  std::vector<std::size_t> order;
  order.reserve(keyed.size());
  for (const auto& [t, i] : keyed) order.push_back(i);
  return order;
}

const Station& nearest_station(const StationLayout& layout,
                               const RoadNetwork& network,
                               const TravelTimeEstimator& estimator,
                               NodeId node) {
  if (layout.empty()) throw ConfigError("station layout is empty");
  const auto& target = network.position(node);
  const Station* best = nullptr;
  double best_t = std::numeric_limits<double>::infinity();
  for (const auto& s : layout.stations) {
    const double t = estimator.estimate(network.position(s.node), target);
    if (t < best_t || (t == best_t && s.id < best->id)) {
      best_t = t;
      best = &s;
    }
  }
  return *best;
}

double mean_access_time(const StationLayout& layout,
                        std::span<const TravelRequest> requests,
                        const RoadNetwork& network,
                        const TravelTimeEstimator& estimator) {
  if (requests.empty()) return 0.0;
  double total = 0.0;
  for (const auto& r : requests) {
    const auto& s = nearest_station(layout, network, estimator, r.origin);
    total += estimator.estimate(network.position(s.node),
                                network.position(r.origin));
  }
  return total / static_cast<double>(requests.size());
}

std::vector<double> origin_weights(const StationLayout& layout,
                                   std::span<const TravelRequest> requests,
                                   const RoadNetwork& network,
                                   const TravelTimeEstimator& estimator) {
  std::vector<double> weights(layout.size(), 0.0);
  if (requests.empty()) {
    std::fill(weights.begin(), weights.end(),
              1.0 / static_cast<double>(layout.size()));
    return weights;
  }
  for (const auto& r : requests) {
    const auto& s = nearest_station(layout, network, estimator, r.origin);
    weights[layout.index_of(s.id)] += 1.0;
  }
  for (auto& w : weights) w /= static_cast<double>(requests.size());
  return weights;
}

std::vector<int> apportion_largest_remainder(int total,
                                             std::span<const double> weights) {
  if (total < 0) throw ConfigError("cannot apportion a negative total");
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (weights.empty() || !(sum > 0.0)) {
    throw ConfigError("apportionment weights must have a positive sum");
  }
  std::vector<int> shares(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw ConfigError("negative apportionment weight");
    const double quota = static_cast<double>(total) * weights[i] / sum;
    shares[i] = static_cast<int>(std::floor(quota));
    assigned += shares[i];
    remainders.emplace_back(quota - std::floor(quota), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  // Floating error can push the floors one unit off in either direction.
  for (std::size_t k = 0; assigned < total; ++k) {
    ++shares[remainders[k % remainders.size()].second];
    ++assigned;
  }
  for (std::size_t k = remainders.size(); assigned > total;) {
    --k;
    auto& s = shares[remainders[k].second];
    if (s > 0) {
      --s;
      --assigned;
    }
    if (k == 0) k = remainders.size();
  }
  return shares;
}

void save_layout(const StationLayout& layout,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "id,node,center_x,center_y,initial_stock\n";
  for (const auto& s : layout.stations) {
    out << fmt::format("{},{},{},{},{}\n", s.id, s.node, s.region_center.x,
                       s.region_center.y, s.initial_stock);
  }
}

StationLayout load_layout(const std::filesystem::path& path,
                          const RoadNetwork& network) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  csv::Reader reader(in, path.string());
  reader.require_columns({"id", "node", "center_x", "center_y", "initial_stock"});
  StationLayout layout;
  std::unordered_set<NodeId> nodes;
  while (reader.next()) {
    Station s;
    s.id = reader.as_int("id");
    s.node = reader.as_int("node");
    s.region_center = {reader.as_double("center_x"),
                       reader.as_double("center_y")};
    s.initial_stock = static_cast<int>(reader.as_int("initial_stock"));
    if (!network.has_node(s.node)) {
      throw LoadError(fmt::format("{}: station {}: unknown node {}",
                                  reader.where(), s.id, s.node));
    }
    if (s.initial_stock < 0) {
      throw LoadError(fmt::format("{}: station {}: negative stock",
                                  reader.where(), s.id));
    }
    if (!nodes.insert(s.node).second) {
      throw LoadError(fmt::format("{}: station {}: node {} already used",
                                  reader.where(), s.id, s.node));
    }
    layout.stations.push_back(s);
  }
  return layout;
}

void StationDepot::park(std::size_t station, VehicleId vehicle) {
  if (!idle_.at(station).insert(vehicle).second) {
    throw std::logic_error(
        fmt::format("vehicle {} already parked at station {}", vehicle, station));
  }
}

std::optional<VehicleId> StationDepot::take_lowest(std::size_t station) {
  auto& idle = idle_.at(station);
  if (idle.empty()) return std::nullopt;
  const auto v = *idle.begin();
  idle.erase(idle.begin());
  return v;
}

bool StationDepot::remove(std::size_t station, VehicleId vehicle) {
  return idle_.at(station).erase(vehicle) == 1;
}

std::size_t StationDepot::total_idle() const {
  std::size_t total = 0;
  for (const auto& s : idle_) total += s.size();
  return total;
}

}  // namespace modsim
