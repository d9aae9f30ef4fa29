#include "support.hpp"

#include <cmath>
#include <filesystem>

namespace modsim::testing {

RoadNetwork make_network(
    std::initializer_list<std::tuple<NodeId, double, double>> nodes,
    std::initializer_list<Edge> edges) {
  std::vector<Node> ns;
  for (const auto& [id, x, y] : nodes) ns.push_back({id, {x, y}});
  std::vector<RoadSegment> ss;
  for (const auto& e : edges) {
    ss.push_back({static_cast<SegmentId>(ss.size()), e.from, e.to, e.length_m,
                  e.speed_mps, "residential"});
  }
  return RoadNetwork(std::move(ns), std::move(ss));
}

RoadNetwork line_network(std::size_t n, double spacing, double speed_mps) {
  std::vector<Node> ns;
  std::vector<RoadSegment> ss;
  for (std::size_t i = 0; i < n; ++i) {
    ns.push_back({static_cast<NodeId>(i), {static_cast<double>(i) * spacing, 0.0}});
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto a = static_cast<NodeId>(i), b = static_cast<NodeId>(i + 1);
    ss.push_back({static_cast<SegmentId>(ss.size()), a, b, spacing, speed_mps, ""});
    ss.push_back({static_cast<SegmentId>(ss.size()), b, a, spacing, speed_mps, ""});
  }
  return RoadNetwork(std::move(ns), std::move(ss));
}

RoadNetwork square_network() {
  return make_network({{0, 0, 0}, {1, 100, 0}, {2, 0, 100}, {3, 100, 100}},
                      {{0, 1, 100, 10},
                       {1, 0, 100, 10},
                       {0, 2, 100, 10},
                       {2, 0, 100, 10},
                       {1, 3, 100, 10},
                       {3, 1, 100, 10},
                       {2, 3, 100, 10},
                       {3, 2, 100, 10}});
}

RoadNetwork random_network(std::size_t n, std::size_t extra, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 1000.0);
  std::uniform_real_distribution<double> stretch(1.0, 1.6);
  std::uniform_real_distribution<double> speed(5.0, 20.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<Node> ns;
  for (std::size_t i = 0; i < n; ++i) {
    ns.push_back({static_cast<NodeId>(i), {coord(rng), coord(rng)}});
  }
  std::vector<RoadSegment> ss;
  auto add = [&](std::size_t a, std::size_t b) {
    const double len =
        std::max(1.0, euclidean(ns[a].position, ns[b].position) * stretch(rng));
    ss.push_back({static_cast<SegmentId>(ss.size()), ns[a].id, ns[b].id, len,
                  speed(rng), ""});
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    add(i, i + 1);
    add(i + 1, i);
  }
  for (std::size_t k = 0; k < extra; ++k) {
    const auto a = pick(rng), b = pick(rng);
    if (a != b) add(a, b);
  }
  return RoadNetwork(std::move(ns), std::move(ss));
}

TravelRequest request(RequestId id, double t, NodeId o, NodeId d) {
  return TravelRequest{id, t, o, d};
}

std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("modsim_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace modsim::testing
