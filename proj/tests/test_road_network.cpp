#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "modsim/errors.hpp"
#include "modsim/grid.hpp"
#include "modsim/road_network.hpp"
#include "support.hpp"

using namespace modsim;
using namespace modsim::testing;

namespace {

const std::filesystem::path kFixtures = MODSIM_FIXTURE_DIR;

struct EnumeratedPath {
  std::vector<SegmentId> segments;
  double duration = 0.0;
};

// Every simple path from origin to destination, by depth-first search.
std::vector<EnumeratedPath> all_simple_paths(const RoadNetwork& net, NodeId o,
                                             NodeId d) {
  std::vector<EnumeratedPath> out;
  std::vector<bool> visited(net.node_count(), false);
  EnumeratedPath current;
  std::function<void(NodeId)> dfs = [&](NodeId at) {
    if (at == d) {
      out.push_back(current);
      return;
    }
    visited[net.node_index(at)] = true;
    for (const auto& s : net.segments()) {
      if (s.from != at || visited[net.node_index(s.to)]) continue;
      current.segments.push_back(s.id);
      current.duration += s.traversal_time();
      dfs(s.to);
      current.duration -= s.traversal_time();
      current.segments.pop_back();
    }
    visited[net.node_index(at)] = false;
  };
  dfs(o);
  return out;
}

double path_duration(const RoadNetwork& net, const std::vector<SegmentId>& p) {
  double t = 0.0;
  for (auto id : p) t += net.segment(id).traversal_time();
  return t;
}

}  // namespace

TEST_CASE("single segment traversal time") {
  std::istringstream nodes("id,x,y\n1,0,0\n2,100,0\n");
  std::istringstream segs("id,from,to,length_m,speed_kmh,class\n7,1,2,100,50,\n");
  const auto net = load_network(nodes, segs);
  CHECK(net.node_count() == 2);
  CHECK(net.segment(7).traversal_time() == doctest::Approx(7.2).epsilon(1e-12));
}

TEST_CASE("segment referencing an absent node is rejected") {
  std::istringstream nodes("id,x,y\n1,0,0\n2,100,0\n");
  std::istringstream segs("id,from,to,length_m,speed_kmh,class\n7,1,99,100,50,\n");
  try {
    load_network(nodes, segs);
    FAIL("expected LoadError");
  } catch (const LoadError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("unknown node 99") != std::string::npos);
    CHECK(msg.find("7") != std::string::npos);
  }
}

TEST_CASE("non-positive length and duplicate ids are rejected") {
  std::istringstream nodes("id,x,y\n1,0,0\n2,100,0\n");
  std::istringstream zero("id,from,to,length_m,speed_kmh,class\n7,1,2,0,50,\n");
  CHECK_THROWS_AS(load_network(nodes, zero), LoadError);

  std::istringstream nodes2("id,x,y\n1,0,0\n1,100,0\n");
  std::istringstream segs("id,from,to,length_m,speed_kmh,class\n");
  CHECK_THROWS_AS(load_network(nodes2, segs), LoadError);

  CHECK_THROWS_AS(make_network({{1, 0, 0}, {2, 1, 0}}, {{1, 2, 10, -1}}),
                  LoadError);
}

TEST_CASE("four-node grid fixture file") {
  const auto net = load_network(kFixtures / "grid4_nodes.csv",
                                kFixtures / "grid4_segments.csv");
  CHECK(net.node_count() == 4);
  CHECK(net.segment_count() == 8);
  CHECK(net.strongly_connected());
  // Missing speeds come from the class rules.
  CHECK(net.segment(3).speed_mps == doctest::Approx(130.0 / 3.6));
  CHECK(net.segment(5).speed_mps == doctest::Approx(20.0 / 3.6));
  CHECK(net.segment(7).speed_mps == doctest::Approx(10.0));
}

TEST_CASE("fill_missing_speeds class table") {
  CHECK(fill_missing_speeds("highway") == doctest::Approx(36.11).epsilon(1e-3));
  CHECK(fill_missing_speeds("living_street") == doctest::Approx(5.56).epsilon(1e-3));
  CHECK(fill_missing_speeds(std::nullopt) == doctest::Approx(13.89).epsilon(1e-3));
  CHECK(fill_missing_speeds("primary") == 50.0 / 3.6);
  CHECK(fill_missing_speeds("highway") == 130.0 / 3.6);
  CHECK(fill_missing_speeds("living_street") == 20.0 / 3.6);
}

TEST_CASE("fastest path from a node to itself is empty") {
  const auto net = random_network(8, 10, 3);
  Router router(net);
  for (const auto& n : net.nodes()) {
    const auto p = router.fastest_path(n.id, n.id);
    CHECK(p.segments.empty());
    CHECK(p.duration == 0.0);
    CHECK(p.distance == 0.0);
  }
}

TEST_CASE("fastest path prefers a fast detour that is longer in meters") {
  // 0 -> 2 directly: 300 m at 30 m/s = 10 s; via 1: 2 x 100 m at 10 m/s = 20 s.
  const auto net = make_network({{0, 0, 0}, {1, 100, 0}, {2, 200, 0}},
                                {{0, 1, 100, 10}, {1, 2, 100, 10}, {0, 2, 300, 30}});
  const auto p = fastest_path(net, 0, 2);
  CHECK(p.segments == std::vector<SegmentId>{2});
  CHECK(p.duration == doctest::Approx(10.0));
  CHECK(p.distance == doctest::Approx(300.0));
}

TEST_CASE("equal-duration paths resolve to the smallest segment sequence") {
  const auto net = square_network();
  // 0 -> 3 via 1 uses segments (0, 4); via 2 uses (2, 6).
  CHECK(fastest_path(net, 0, 3).segments == std::vector<SegmentId>{0, 4});
  CHECK(fastest_path(net, 3, 0).segments == std::vector<SegmentId>{5, 1});
}

TEST_CASE("uniform speed makes the fastest path the shortest one") {
  const auto net = make_network({{0, 0, 0}, {1, 50, 50}, {2, 100, 0}, {3, 50, -10}},
                                {{0, 1, 80, 10}, {1, 2, 80, 10}, {0, 3, 60, 10},
                                 {3, 2, 60, 10}, {0, 2, 130, 10}});
  const auto p = fastest_path(net, 0, 2);
  CHECK(p.distance == doctest::Approx(120.0));
  CHECK(p.segments == std::vector<SegmentId>{2, 3});
}

TEST_CASE("unreachable destination raises NoPathError") {
  const auto net = make_network({{0, 0, 0}, {1, 10, 0}}, {{0, 1, 10, 1}});
  CHECK_THROWS_AS(fastest_path(net, 1, 0), NoPathError);
  CHECK_FALSE(net.reachable(1, 0));
  CHECK(net.reachable(0, 1));
  Router router(net);
  CHECK(std::isinf(router.durations_from(1)[net.node_index(0)]));
}

TEST_CASE("fastest path matches exhaustive enumeration on small networks") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto net = random_network(seed % 3 == 0 ? 8 : 6, 12, seed);
    Router router(net);
    for (const auto& o : net.nodes()) {
      for (const auto& d : net.nodes()) {
        const auto paths = all_simple_paths(net, o.id, d.id);
        REQUIRE_FALSE(paths.empty());
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : paths) best = std::min(best, p.duration);
        const auto found = router.fastest_path(o.id, d.id);
        CHECK(found.duration == doctest::Approx(best).epsilon(1e-12));
        CHECK(path_duration(net, found.segments) ==
              doctest::Approx(found.duration).epsilon(1e-12));
        // Path contiguity.
        NodeId at = o.id;
        for (auto s : found.segments) {
          CHECK(net.segment(s).from == at);
          at = net.segment(s).to;
        }
        CHECK(at == d.id);
        CHECK(router.fastest_duration(o.id, d.id) ==
              doctest::Approx(found.duration).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("nearest node agrees with a linear scan") {
  const auto net = random_network(60, 0, 9);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coord(-200.0, 1200.0);
  for (int k = 0; k < 500; ++k) {
    const Point p{coord(rng), coord(rng)};
    NodeId best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const auto& n : net.nodes()) {
      const double d2 = squared_distance(p, n.position);
      if (d2 < best_d2 || (d2 == best_d2 && n.id < best)) {
        best_d2 = d2;
        best = n.id;
      }
    }
    CHECK(net.nearest_node(p) == best);
  }
}

TEST_CASE("estimate_time arithmetic and symmetry") {
  TravelTimeEstimator e{10.0, 0.1, 0.0};
  CHECK(estimate_time(e, {0, 0}, {1000, 0}) == doctest::Approx(110.0));
  CHECK(estimate_time(e, {5, 5}, {5, 5}) == 10.0);
  TravelTimeEstimator negative{-10.0, 0.1, 0.0};
  CHECK(estimate_time(negative, {5, 5}, {5, 5}) == 0.0);
  CHECK(estimate_time(negative, {0, 0}, {50, 0}) == 0.0);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> c(-1e4, 1e4);
  for (int k = 0; k < 200; ++k) {
    const Point a{c(rng), c(rng)}, b{c(rng), c(rng)};
    CHECK(estimate_time(e, a, b) == estimate_time(e, b, a));
  }
}

TEST_CASE("calibration on a straight line with uniform speed is exact") {
  const auto net = line_network(30, 100.0, 12.5);
  const auto est = calibrate_estimator(net, 200, 7);
  CHECK(est.slope == doctest::Approx(1.0 / 12.5).epsilon(1e-9));
  CHECK(std::abs(est.intercept) < 1e-6);
  CHECK(est.calibration_error < 1e-6);
}

TEST_CASE("calibration equals the closed-form least-squares solution") {
  const auto net = make_grid_network({8, 9, 120.0, 50.0, 3, 80.0});
  const auto samples = draw_calibration_samples(net, 100, 5);
  REQUIRE(samples.size() == 100);

  // Normal equations on raw sums.
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  Router router(net);
  for (const auto& s : samples) {
    CHECK(s.origin != s.destination);
    CHECK(s.distance == euclidean(net.position(s.origin), net.position(s.destination)));
    CHECK(s.duration == doctest::Approx(router.fastest_duration(s.origin, s.destination))
                            .epsilon(1e-12));
    n += 1;
    sx += s.distance;
    sy += s.duration;
    sxx += s.distance * s.distance;
    sxy += s.distance * s.duration;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss = 0;
  for (const auto& s : samples) {
    const double r = s.duration - (intercept + slope * s.distance);
    ss += r * r;
  }
  const double rmse = std::sqrt(ss / n);

  const auto est = calibrate_estimator(net, 100, 5);
  CHECK(est.slope == doctest::Approx(slope).epsilon(1e-9));
  CHECK(est.intercept == doctest::Approx(intercept).epsilon(1e-9));
  CHECK(est.calibration_error == doctest::Approx(rmse).epsilon(1e-9));
}

TEST_CASE("calibration is deterministic for a seed") {
  const auto net = random_network(30, 40, 2);
  const auto a = calibrate_estimator(net, 150, 99);
  const auto b = calibrate_estimator(net, 150, 99);
  CHECK(a.slope == b.slope);
  CHECK(a.intercept == b.intercept);
  CHECK(a.calibration_error == b.calibration_error);
}

TEST_CASE("degenerate calibration samples raise CalibrationError") {
  const auto net = line_network(2, 100.0, 10.0);
  CHECK_THROWS_AS(calibrate_estimator(net, 20, 1), CalibrationError);
  std::vector<CalibrationSample> one{{0, 1, 100.0, 10.0}};
  CHECK_THROWS_AS(fit_estimator(one), CalibrationError);
}

TEST_CASE("network and estimator files round-trip") {
  const auto dir = std::filesystem::path(temp_dir("network_roundtrip"));
  const auto net = random_network(12, 10, 8);
  save_network(net, dir / "nodes.csv", dir / "segments.csv");
  const auto back = load_network(dir / "nodes.csv", dir / "segments.csv");
  REQUIRE(back.segment_count() == net.segment_count());
  for (const auto& s : net.segments()) {
    const auto& t = back.segment(s.id);
    CHECK(t.from == s.from);
    CHECK(t.to == s.to);
    CHECK(t.length_m == s.length_m);
    CHECK(t.speed_mps == doctest::Approx(s.speed_mps).epsilon(1e-12));
  }
  const TravelTimeEstimator est{3.5, 0.0812345678901, 1.25};
  save_estimator(est, dir / "estimator.json");
  const auto e2 = load_estimator(dir / "estimator.json");
  CHECK(e2.intercept == est.intercept);
  CHECK(e2.slope == est.slope);
  CHECK(e2.calibration_error == est.calibration_error);
}

TEST_CASE("geojson conversion projects and fills attributes") {
  std::ifstream in(kFixtures / "small.geojson");
  REQUIRE(in);
  const auto net = convert_geojson(in);
  CHECK(net.node_count() == 3);
  // The two-way motorway emits two segments, the one-way residential one.
  REQUIRE(net.segment_count() == 3);
  const auto& s0 = net.segment(0);
  CHECK(s0.road_class == "highway");
  CHECK(s0.speed_mps == doctest::Approx(130.0 / 3.6));
  CHECK(net.segment(1).from == s0.to);
  const auto& s2 = net.segment(2);
  CHECK(s2.speed_mps == doctest::Approx(30.0 / 3.6));
  CHECK_FALSE(net.reachable(3, 2));

  const double R = 6371008.8;
  const double lat0 = (50.08 + 50.08 + 50.09) / 3.0 * std::numbers::pi / 180.0;
  const double east = R * (0.01 * std::numbers::pi / 180.0) * std::cos(lat0);
  const double north = R * (0.01 * std::numbers::pi / 180.0);
  CHECK(s0.length_m == doctest::Approx(east).epsilon(1e-9));
  CHECK(s2.length_m == doctest::Approx(north).epsilon(1e-9));
}
