#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "modsim/geometry.hpp"

namespace modsim {

using NodeId = std::int64_t;
using SegmentId = std::int64_t;

struct Node {
  NodeId id = 0;
  Point position;
};

struct RoadSegment {
  SegmentId id = 0;
  NodeId from = 0;
  NodeId to = 0;
  double length_m = 0.0;
  double speed_mps = 0.0;
  std::string road_class;

  double traversal_time() const { return length_m / speed_mps; }
};

/// Speed limit (m/s) for a segment without an explicit one, by road class:
/// highway 130 km/h, living_street 20 km/h, anything else 50 km/h.
double fill_missing_speeds(std::optional<std::string_view> road_class);

inline double kmh_to_mps(double kmh) { return kmh / 3.6; }

/// Immutable directed road graph. Node and segment ids are arbitrary
/// integers; internally everything is addressed by dense indices.
class RoadNetwork {
 public:
  RoadNetwork() = default;

  /// Validates ids, endpoints, lengths and speeds. Throws LoadError.
  RoadNetwork(std::vector<Node> nodes, std::vector<RoadSegment> segments);

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const RoadSegment> segments() const { return segments_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t segment_count() const { return segments_.size(); }

  bool has_node(NodeId id) const { return node_index_.contains(id); }
  bool has_segment(SegmentId id) const { return segment_index_.contains(id); }

  /// Throws std::out_of_range for unknown ids.
  std::size_t node_index(NodeId id) const;
  std::size_t segment_index(SegmentId id) const;
  const Node& node(NodeId id) const { return nodes_[node_index(id)]; }
  const RoadSegment& segment(SegmentId id) const {
    return segments_[segment_index(id)];
  }
  const Point& position(NodeId id) const { return node(id).position; }

  /// Segment indices leaving / entering a node index, ascending segment id.
  std::span<const std::size_t> outgoing(std::size_t node_idx) const;
  std::span<const std::size_t> incoming(std::size_t node_idx) const;

  /// Node indices of a segment's endpoints, by segment index.
  std::size_t tail(std::size_t segment_idx) const { return tail_[segment_idx]; }
  std::size_t head(std::size_t segment_idx) const { return head_[segment_idx]; }

  /// Node closest to `p`; ties go to the smaller node id.
  NodeId nearest_node(const Point& p) const;

  /// True if `to` can be reached from `from` along directed segments.
  bool reachable(NodeId from, NodeId to) const;

  bool strongly_connected() const { return component_count_ == 1; }

 private:
  void build_adjacency();
  void build_components();
  void build_spatial_index();

  std::vector<Node> nodes_;
  std::vector<RoadSegment> segments_;
  std::unordered_map<NodeId, std::size_t> node_index_;
  std::unordered_map<SegmentId, std::size_t> segment_index_;

  std::vector<std::size_t> tail_, head_;

  // CSR adjacency.
  std::vector<std::size_t> out_offsets_, out_edges_;
  std::vector<std::size_t> in_offsets_, in_edges_;

  std::vector<std::size_t> component_;
  std::size_t component_count_ = 0;

  // Uniform grid bucketing of node indices.
  Point grid_origin_;
  double cell_size_ = 1.0;
  std::size_t grid_cols_ = 0, grid_rows_ = 0;
  std::vector<std::size_t> cell_offsets_, cell_nodes_;
};

RoadNetwork load_network(const std::filesystem::path& nodes_csv,
                         const std::filesystem::path& segments_csv);
RoadNetwork load_network(std::istream& nodes_csv, std::istream& segments_csv,
                         std::string_view nodes_name = "nodes",
                         std::string_view segments_name = "segments");

/// Writes the `id,x,y` and `id,from,to,length_m,speed_kmh,class` files.
void save_network(const RoadNetwork& network,
                  const std::filesystem::path& nodes_csv,
                  const std::filesystem::path& segments_csv);

struct Path {
  std::vector<SegmentId> segments;
  double duration = 0.0;  // seconds
  double distance = 0.0;  // meters
};

/// Label-setting fastest path search with reusable scratch space. Among
/// paths of equal duration the lexicographically smallest segment-id
/// sequence is returned. One Router per thread.
class Router {
 public:
  explicit Router(const RoadNetwork& network);

  /// Throws NoPathError when the destination is unreachable.
  Path fastest_path(NodeId origin, NodeId destination);

  /// Duration of the fastest route; throws NoPathError when unreachable.
  double fastest_duration(NodeId origin, NodeId destination);

  /// Fastest durations from `origin` to every node index (infinity when
  /// unreachable).
  std::vector<double> durations_from(NodeId origin);

  const RoadNetwork& network() const { return network_; }

 private:
  // Reverse search from destination until origin is settled. Returns false
  // when origin is unreachable.
  bool settle_reverse(std::size_t origin, std::size_t destination);

  const RoadNetwork& network_;
  std::vector<double> label_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint8_t> settled_;
  std::uint32_t generation_ = 0;
};

Path fastest_path(const RoadNetwork& network, NodeId origin,
                  NodeId destination);

/// Linear travel-time model on Euclidean distance, clamped at zero.
struct TravelTimeEstimator {
  double intercept = 0.0;          // seconds
  double slope = 0.0;              // seconds per meter
  double calibration_error = 0.0;  // RMS residual, seconds

  double estimate_distance(double meters) const;
  double estimate(const Point& a, const Point& b) const {
    return estimate_distance(euclidean(a, b));
  }
};

double estimate_time(const TravelTimeEstimator& estimator, const Point& a,
                     const Point& b);

struct CalibrationSample {
  NodeId origin = 0;
  NodeId destination = 0;
  double distance = 0.0;  // Euclidean meters
  double duration = 0.0;  // fastest-route seconds
};

/// Uniformly drawn node pairs (origin != destination, destination
/// reachable), seeded.
std::vector<CalibrationSample> draw_calibration_samples(
    const RoadNetwork& network, std::size_t sample_count, std::uint64_t seed);

/// Ordinary least squares of duration on distance.
TravelTimeEstimator fit_estimator(std::span<const CalibrationSample> samples);

TravelTimeEstimator calibrate_estimator(const RoadNetwork& network,
                                        std::size_t sample_count,
                                        std::uint64_t seed);

void save_estimator(const TravelTimeEstimator& estimator,
                    const std::filesystem::path& json_path);
TravelTimeEstimator load_estimator(const std::filesystem::path& json_path);

/// Converts a GeoJSON FeatureCollection dump to the node/segment CSV pair.
///
/// Point features become nodes (`properties.id`). LineString features
/// become segments between `properties.from` and `properties.to`, with
/// optional `maxspeed` (km/h), `highway` (class) and `oneway` (default
/// false, which emits both directions). Coordinates are [lon, lat] degrees
/// and are projected equirectangularly around the mean node position.
/// OSM `motorway`/`motorway_link` map to class `highway`. Everything else
/// in the dump is dropped. Segment ids are assigned sequentially.
RoadNetwork convert_geojson(std::istream& geojson);

}  // namespace modsim
