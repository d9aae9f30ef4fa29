#include "modsim/road_network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>
#include "json.hpp"

#include "modsim/csv.hpp"
#include "modsim/errors.hpp"

namespace modsim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  return in;
}

}  // namespace

double fill_missing_speeds(std::optional<std::string_view> road_class) {
  if (road_class == "highway") return kmh_to_mps(130.0);
  if (road_class == "living_street") return kmh_to_mps(20.0);
  return kmh_to_mps(50.0);
}

RoadNetwork::RoadNetwork(std::vector<Node> nodes,
                         std::vector<RoadSegment> segments)
    : nodes_(std::move(nodes)), segments_(std::move(segments)) {
  node_index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!std::isfinite(n.position.x) || !std::isfinite(n.position.y)) {
      throw LoadError(fmt::format("node {} has non-finite coordinates", n.id));
    }
    if (!node_index_.emplace(n.id, i).second) {
      throw LoadError(fmt::format("duplicate node id {}", n.id));
    }
  }
  segment_index_.reserve(segments_.size());
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!has_node(s.from)) {
      throw LoadError(
          fmt::format("segment {}: unknown node {}", s.id, s.from));
    }
    if (!has_node(s.to)) {
      throw LoadError(fmt::format("segment {}: unknown node {}", s.id, s.to));
    }
    if (!(s.length_m > 0.0) || !std::isfinite(s.length_m)) {
      throw LoadError(
          fmt::format("segment {}: non-positive length {}", s.id, s.length_m));
    }
    if (!(s.speed_mps > 0.0) || !std::isfinite(s.speed_mps)) {
      throw LoadError(fmt::format("segment {}: non-positive speed limit {}",
                                  s.id, s.speed_mps));
    }
    if (!segment_index_.emplace(s.id, i).second) {
      throw LoadError(fmt::format("duplicate segment id {}", s.id));
    }
  }
  tail_.reserve(segments_.size());
  head_.reserve(segments_.size());
  for (const auto& s : segments_) {
    tail_.push_back(node_index_.at(s.from));
    head_.push_back(node_index_.at(s.to));
  }
  build_adjacency();
  build_components();
  build_spatial_index();
}

std::size_t RoadNetwork::node_index(NodeId id) const {
  const auto it = node_index_.find(id);
  if (it == node_index_.end()) {
    throw std::out_of_range(fmt::format("unknown node {}", id));
  }
  return it->second;
}

std::size_t RoadNetwork::segment_index(SegmentId id) const {
  const auto it = segment_index_.find(id);
  if (it == segment_index_.end()) {
    throw std::out_of_range(fmt::format("unknown segment {}", id));
  }
  return it->second;
}

std::span<const std::size_t> RoadNetwork::outgoing(std::size_t node_idx) const {
  return std::span(out_edges_).subspan(
      out_offsets_[node_idx], out_offsets_[node_idx + 1] - out_offsets_[node_idx]);
}

std::span<const std::size_t> RoadNetwork::incoming(std::size_t node_idx) const {
  return std::span(in_edges_).subspan(
      in_offsets_[node_idx], in_offsets_[node_idx + 1] - in_offsets_[node_idx]);
}

void RoadNetwork::build_adjacency() {
  const auto n = nodes_.size();
  std::vector<std::size_t> order(segments_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return segments_[a].id < segments_[b].id;
  });

  auto build = [&](const std::vector<std::size_t>& endpoint,
                   std::vector<std::size_t>& offsets,
                   std::vector<std::size_t>& edges) {
    offsets.assign(n + 1, 0);
    for (auto v : endpoint) ++offsets[v + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    edges.resize(segments_.size());
    auto cursor = offsets;
    for (auto idx : order) edges[cursor[endpoint[idx]]++] = idx;
  };
  build(tail_, out_offsets_, out_edges_);
  build(head_, in_offsets_, in_edges_);
}

void RoadNetwork::build_components() {
  // Kosaraju, iterative.
  const auto n = nodes_.size();
  std::vector<std::size_t> finish_order;
  finish_order.reserve(n);
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (seen[root]) continue;
    seen[root] = 1;
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto out = outgoing(v);
      if (next < out.size()) {
        const auto w = head_[out[next++]];
        if (!seen[w]) {
          seen[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        finish_order.push_back(v);
        stack.pop_back();
      }
    }
  }

  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  component_.assign(n, kUnset);
  component_count_ = 0;
  std::vector<std::size_t> work;
  for (auto it = finish_order.rbegin(); it != finish_order.rend(); ++it) {
    if (component_[*it] != kUnset) continue;
    const auto c = component_count_++;
    component_[*it] = c;
    work.push_back(*it);
    while (!work.empty()) {
      const auto v = work.back();
      work.pop_back();
      for (auto e : incoming(v)) {
        const auto u = tail_[e];
        if (component_[u] == kUnset) {
          component_[u] = c;
          work.push_back(u);
        }
      }
    }
  }
}

bool RoadNetwork::reachable(NodeId from, NodeId to) const {
  const auto src = node_index(from);
  const auto dst = node_index(to);
  if (component_[src] == component_[dst]) return true;
  std::vector<std::uint8_t> seen(nodes_.size(), 0);
  std::vector<std::size_t> work{src};
  seen[src] = 1;
  while (!work.empty()) {
    const auto v = work.back();
    work.pop_back();
    for (auto e : outgoing(v)) {
      const auto w = head_[e];
      if (w == dst) return true;
      if (!seen[w]) {
        seen[w] = 1;
        work.push_back(w);
      }
    }
  }
  return false;
}

void RoadNetwork::build_spatial_index() {
  cell_offsets_.clear();
  cell_nodes_.clear();
  grid_cols_ = grid_rows_ = 0;
  if (nodes_.empty()) return;

  Point lo = nodes_.front().position;
  Point hi = lo;
  for (const auto& n : nodes_) {
    lo.x = std::min(lo.x, n.position.x);
    lo.y = std::min(lo.y, n.position.y);
    hi.x = std::max(hi.x, n.position.x);
    hi.y = std::max(hi.y, n.position.y);
  }
  const double width = hi.x - lo.x;
  const double height = hi.y - lo.y;
  const double area = std::max(width, 1.0) * std::max(height, 1.0);
  cell_size_ = std::max(std::sqrt(area / static_cast<double>(nodes_.size())),
                        1.0);
  grid_origin_ = lo;
  grid_cols_ = static_cast<std::size_t>(width / cell_size_) + 1;
  grid_rows_ = static_cast<std::size_t>(height / cell_size_) + 1;

  auto cell_of = [&](const Point& p) {
    const auto cx = std::min(
        static_cast<std::size_t>((p.x - lo.x) / cell_size_), grid_cols_ - 1);
    const auto cy = std::min(
        static_cast<std::size_t>((p.y - lo.y) / cell_size_), grid_rows_ - 1);
    return cy * grid_cols_ + cx;
  };
  cell_offsets_.assign(grid_cols_ * grid_rows_ + 1, 0);
  for (const auto& n : nodes_) ++cell_offsets_[cell_of(n.position) + 1];
  std::partial_sum(cell_offsets_.begin(), cell_offsets_.end(),
                   cell_offsets_.begin());
  cell_nodes_.resize(nodes_.size());
  auto cursor = cell_offsets_;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    cell_nodes_[cursor[cell_of(nodes_[i].position)]++] = i;
  }
}

NodeId RoadNetwork::nearest_node(const Point& p) const {
  if (nodes_.empty()) throw std::logic_error("nearest_node on empty network");

  // Search rings of cells around the cell containing the projection of p
  // onto the bounding box. Projection onto a convex set is non-expansive,
  // so ring r only holds nodes at distance >= (r - 1) * cell_size_.
  const auto clamp_cell = [](double v, std::size_t count) {
    if (!(v > 0.0)) return std::ptrdiff_t{0};
    return static_cast<std::ptrdiff_t>(
        std::min(static_cast<double>(count - 1), std::floor(v)));
  };
  const auto cx = clamp_cell((p.x - grid_origin_.x) / cell_size_, grid_cols_);
  const auto cy = clamp_cell((p.y - grid_origin_.y) / cell_size_, grid_rows_);
  const auto cols = static_cast<std::ptrdiff_t>(grid_cols_);
  const auto rows = static_cast<std::ptrdiff_t>(grid_rows_);

  double best_d2 = kInf;
  std::size_t best = 0;
  auto visit = [&](std::ptrdiff_t x, std::ptrdiff_t y) {
    if (x < 0 || y < 0 || x >= cols || y >= rows) return;
    const auto cell = static_cast<std::size_t>(y * cols + x);
    for (auto k = cell_offsets_[cell]; k < cell_offsets_[cell + 1]; ++k) {
      const auto i = cell_nodes_[k];
      const double d2 = squared_distance(p, nodes_[i].position);
      if (d2 < best_d2 || (d2 == best_d2 && nodes_[i].id < nodes_[best].id)) {
        best_d2 = d2;
        best = i;
      }
    }
  };

  const auto max_ring = std::max(cols, rows);
  for (std::ptrdiff_t r = 0; r <= max_ring; ++r) {
    if (r == 0) {
      visit(cx, cy);
    } else {
      for (auto x = cx - r; x <= cx + r; ++x) {
        visit(x, cy - r);
        visit(x, cy + r);
      }
      for (auto y = cy - r + 1; y <= cy + r - 1; ++y) {
        visit(cx - r, y);
        visit(cx + r, y);
      }
    }
    const double bound = static_cast<double>(r) * cell_size_;
    if (best_d2 < bound * bound) break;
  }
  return nodes_[best].id;
}

RoadNetwork load_network(std::istream& nodes_csv, std::istream& segments_csv,
                         std::string_view nodes_name,
                         std::string_view segments_name) {
  std::vector<Node> nodes;
  {
    csv::Reader reader(nodes_csv, std::string(nodes_name));
    reader.require_columns({"id", "x", "y"});
    while (reader.next()) {
      nodes.push_back(Node{reader.as_int("id"),
                           {reader.as_double("x"), reader.as_double("y")}});
    }
  }
  std::vector<RoadSegment> segments;
  {
    csv::Reader reader(segments_csv, std::string(segments_name));
    reader.require_columns({"id", "from", "to", "length_m"});
    const bool has_speed = reader.has_column("speed_kmh");
    const bool has_class = reader.has_column("class");
    while (reader.next()) {
      RoadSegment s;
      s.id = reader.as_int("id");
      s.from = reader.as_int("from");
      s.to = reader.as_int("to");
      s.length_m = reader.as_double("length_m");
      if (has_class) s.road_class = std::string(reader.field("class"));
      const auto kmh =
          has_speed ? reader.as_optional_double("speed_kmh") : std::nullopt;
      if (kmh) {
        s.speed_mps = kmh_to_mps(*kmh);
      } else {
        s.speed_mps = fill_missing_speeds(
            s.road_class.empty() ? std::nullopt
                                 : std::optional<std::string_view>(s.road_class));
      }
      segments.push_back(std::move(s));
    }
  }
  return RoadNetwork(std::move(nodes), std::move(segments));
}

RoadNetwork load_network(const std::filesystem::path& nodes_csv,
                         const std::filesystem::path& segments_csv) {
  auto nodes_in = open_input(nodes_csv);
  auto segments_in = open_input(segments_csv);
  return load_network(nodes_in, segments_in, nodes_csv.string(),
                      segments_csv.string());
}

void save_network(const RoadNetwork& network,
                  const std::filesystem::path& nodes_csv,
                  const std::filesystem::path& segments_csv) {
  std::ofstream nodes_out(nodes_csv);
  std::ofstream segments_out(segments_csv);
  if (!nodes_out || !segments_out) {
    throw Error("cannot write network files next to " + nodes_csv.string());
  }
  nodes_out << "id,x,y\n";
  for (const auto& n : network.nodes()) {
    nodes_out << fmt::format("{},{},{}\n", n.id, n.position.x, n.position.y);
  }
  segments_out << "id,from,to,length_m,speed_kmh,class\n";
  for (const auto& s : network.segments()) {
    segments_out << fmt::format("{},{},{},{},{},{}\n", s.id, s.from, s.to,
                                s.length_m, s.speed_mps * 3.6, s.road_class);
  }
}

// ---------------------------------------------------------------------------
// Routing

Router::Router(const RoadNetwork& network)
    : network_(network),
      label_(network.node_count(), kInf),
      stamp_(network.node_count(), 0),
      settled_(network.node_count(), 0) {}

bool Router::settle_reverse(std::size_t origin, std::size_t destination) {
  if (++generation_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    generation_ = 1;
  }
  auto touch = [&](std::size_t v) {
    if (stamp_[v] != generation_) {
      stamp_[v] = generation_;
      label_[v] = kInf;
      settled_[v] = 0;
    }
  };

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  touch(destination);
  label_[destination] = 0.0;
  heap.emplace(0.0, destination);
  const auto segments = network_.segments();
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (settled_[v]) continue;
    settled_[v] = 1;
    if (v == origin) return true;
    for (auto e : network_.incoming(v)) {
      const auto& s = segments[e];
      const auto u = network_.tail(e);
      touch(u);
      if (settled_[u]) continue;
      const double cand = d + s.traversal_time();
      if (cand < label_[u]) {
        label_[u] = cand;
        heap.emplace(cand, u);
      }
    }
  }
  return false;
}

Path Router::fastest_path(NodeId origin, NodeId destination) {
  const auto src = network_.node_index(origin);
  const auto dst = network_.node_index(destination);
  Path path;
  if (src == dst) return path;
  if (!settle_reverse(src, dst)) throw NoPathError(origin, destination);

  // Greedy walk along tight segments, smallest id first, yields the
  // lexicographically smallest optimal sequence.
  const auto segments = network_.segments();
  auto v = src;
  for (std::size_t steps = 0; v != dst; ++steps) {
    if (steps > network_.node_count()) {
      throw std::logic_error("fastest_path: walk did not terminate");
    }
    const double remaining = label_[v];
    const double tol = 1e-9 * std::max(1.0, remaining);
    std::size_t chosen = std::numeric_limits<std::size_t>::max();
    for (auto e : network_.outgoing(v)) {
      const auto& s = segments[e];
      const auto w = network_.head(e);
      if (stamp_[w] != generation_ || !settled_[w]) continue;
      if (std::abs(s.traversal_time() + label_[w] - remaining) <= tol &&
          label_[w] < remaining) {
        chosen = e;
        break;
      }
    }
    if (chosen == std::numeric_limits<std::size_t>::max()) {
      throw std::logic_error("fastest_path: no tight segment found");
    }
    const auto& s = segments[chosen];
    path.segments.push_back(s.id);
    path.duration += s.traversal_time();
    path.distance += s.length_m;
    v = network_.head(chosen);
  }
  return path;
}

double Router::fastest_duration(NodeId origin, NodeId destination) {
  const auto src = network_.node_index(origin);
  const auto dst = network_.node_index(destination);
  if (src == dst) return 0.0;
  if (!settle_reverse(src, dst)) throw NoPathError(origin, destination);
  return label_[src];
}

std::vector<double> Router::durations_from(NodeId origin) {
  const auto src = network_.node_index(origin);
  std::vector<double> dist(network_.node_count(), kInf);
  std::vector<std::uint8_t> done(network_.node_count(), 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[src] = 0.0;
  heap.emplace(0.0, src);
  const auto segments = network_.segments();
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (done[v]) continue;
    done[v] = 1;
    for (auto e : network_.outgoing(v)) {
      const auto& s = segments[e];
      const auto w = network_.head(e);
      const double cand = d + s.traversal_time();
      if (cand < dist[w]) {
        dist[w] = cand;
        heap.emplace(cand, w);
      }
    }
  }
  return dist;
}

Path fastest_path(const RoadNetwork& network, NodeId origin,
                  NodeId destination) {
  Router router(network);
  return router.fastest_path(origin, destination);
}

// ---------------------------------------------------------------------------
// Travel-time estimator

double TravelTimeEstimator::estimate_distance(double meters) const {
  return std::max(0.0, intercept + slope * meters);
}

double estimate_time(const TravelTimeEstimator& estimator, const Point& a,
                     const Point& b) {
  return estimator.estimate(a, b);
}

std::vector<CalibrationSample> draw_calibration_samples(
    const RoadNetwork& network, std::size_t sample_count, std::uint64_t seed) {
  if (sample_count < 2) {
    throw CalibrationError("calibration needs at least 2 samples");
  }
  if (network.node_count() < 2) {
    throw CalibrationError("calibration needs at least 2 nodes");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, network.node_count() - 1);
  Router router(network);
  const auto nodes = network.nodes();

  std::vector<CalibrationSample> samples;
  samples.reserve(sample_count);
  const std::size_t max_draws = 100 * sample_count + 1000;
  for (std::size_t draws = 0; samples.size() < sample_count; ++draws) {
    if (draws >= max_draws) {
      throw CalibrationError(
          "could not draw enough reachable node pairs for calibration");
    }
    const auto& a = nodes[pick(rng)];
    const auto& b = nodes[pick(rng)];
    if (a.id == b.id || !network.reachable(a.id, b.id)) continue;
    samples.push_back(CalibrationSample{
        a.id, b.id, euclidean(a.position, b.position),
        router.fastest_path(a.id, b.id).duration});
  }
  return samples;
}

TravelTimeEstimator fit_estimator(std::span<const CalibrationSample> samples) {
  if (samples.size() < 2) {
    throw CalibrationError("calibration needs at least 2 samples");
  }
  const auto n = static_cast<double>(samples.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& s : samples) {
    mean_x += s.distance;
    mean_y += s.duration;
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& s : samples) {
    sxx += (s.distance - mean_x) * (s.distance - mean_x);
    sxy += (s.distance - mean_x) * (s.duration - mean_y);
  }
  if (!(sxx > 1e-12 * std::max(1.0, mean_x * mean_x) * n)) {
    throw CalibrationError(
        "degenerate calibration samples: all pairs have the same distance");
  }
  TravelTimeEstimator est;
  est.slope = sxy / sxx;
  est.intercept = mean_y - est.slope * mean_x;
  if (!(est.slope > 0.0)) {
    throw CalibrationError(
        fmt::format("calibration produced non-positive slope {}", est.slope));
  }
  double sse = 0.0;
  for (const auto& s : samples) {
    const double r = s.duration - (est.intercept + est.slope * s.distance);
    sse += r * r;
  }
  est.calibration_error = std::sqrt(sse / n);
  return est;
}

TravelTimeEstimator calibrate_estimator(const RoadNetwork& network,
                                        std::size_t sample_count,
                                        std::uint64_t seed) {
  const auto samples = draw_calibration_samples(network, sample_count, seed);
  return fit_estimator(samples);
}

void save_estimator(const TravelTimeEstimator& estimator,
                    const std::filesystem::path& json_path) {
  nlohmann::ordered_json doc;
  doc["intercept_s"] = estimator.intercept;
  doc["slope_s_per_m"] = estimator.slope;
  doc["calibration_rmse_s"] = estimator.calibration_error;
  std::ofstream out(json_path);
  if (!out) throw Error("cannot write " + json_path.string());
  out << doc.dump(2) << "\n";
}

TravelTimeEstimator load_estimator(const std::filesystem::path& json_path) {
  auto in = open_input(json_path);
  try {
    const auto doc = nlohmann::json::parse(in);
    TravelTimeEstimator est;
    est.intercept = doc.at("intercept_s").get<double>();
    est.slope = doc.at("slope_s_per_m").get<double>();
    est.calibration_error = doc.value("calibration_rmse_s", 0.0);
    if (!(est.slope > 0.0)) {
      throw LoadError(json_path.string() + ": slope must be positive");
    }
    return est;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(json_path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// GeoJSON ingestion

RoadNetwork convert_geojson(std::istream& geojson) {
  constexpr double kEarthRadius = 6371008.8;
  constexpr double kDeg = 3.14159265358979323846 / 180.0;

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(geojson);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("geojson: ") + e.what());
  }
  struct RawNode {
    NodeId id;
    double lon, lat;
  };
  std::vector<RawNode> raw_nodes;
  std::vector<const nlohmann::json*> ways;
  for (const auto& f : doc.at("features")) {
    const auto& type = f.at("geometry").at("type");
    if (type == "Point") {
      const auto& c = f["geometry"]["coordinates"];
      raw_nodes.push_back(RawNode{f.at("properties").at("id").get<NodeId>(),
                                  c.at(0).get<double>(), c.at(1).get<double>()});
    } else if (type == "LineString") {
      ways.push_back(&f);
    }
  }
  if (raw_nodes.empty()) throw LoadError("geojson: no Point features");

  double lat0 = 0.0, lon0 = 0.0;
  for (const auto& n : raw_nodes) {
    lat0 += n.lat;
    lon0 += n.lon;
  }
  lat0 /= static_cast<double>(raw_nodes.size());
  lon0 /= static_cast<double>(raw_nodes.size());
  const double cos_lat0 = std::cos(lat0 * kDeg);
  auto project = [&](double lon, double lat) {
    return Point{kEarthRadius * (lon - lon0) * kDeg * cos_lat0,
                 kEarthRadius * (lat - lat0) * kDeg};
  };

  std::vector<Node> nodes;
  nodes.reserve(raw_nodes.size());
  for (const auto& n : raw_nodes) nodes.push_back({n.id, project(n.lon, n.lat)});

  std::vector<RoadSegment> segments;
  SegmentId next_id = 0;
  for (const auto* way : ways) {
    const auto& props = way->at("properties");
    const auto& coords = way->at("geometry").at("coordinates");
    double length = 0.0;
    for (std::size_t k = 1; k < coords.size(); ++k) {
      length += euclidean(
          project(coords[k - 1][0].get<double>(), coords[k - 1][1].get<double>()),
          project(coords[k][0].get<double>(), coords[k][1].get<double>()));
    }
    std::string road_class = props.value("highway", std::string{});
    if (road_class == "motorway" || road_class == "motorway_link") {
      road_class = "highway";
    }
    const double speed =
        props.contains("maxspeed") && props["maxspeed"].is_number()
            ? kmh_to_mps(props["maxspeed"].get<double>())
            : fill_missing_speeds(road_class.empty()
                                      ? std::nullopt
                                      : std::optional<std::string_view>(road_class));
    const auto from = props.at("from").get<NodeId>();
    const auto to = props.at("to").get<NodeId>();
    segments.push_back({next_id++, from, to, length, speed, road_class});
    if (!props.value("oneway", false)) {
      segments.push_back({next_id++, to, from, length, speed, road_class});
    }
  }
  return RoadNetwork(std::move(nodes), std::move(segments));
}

}  // namespace modsim
