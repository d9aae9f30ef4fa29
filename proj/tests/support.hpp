#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "modsim/demand.hpp"
#include "modsim/road_network.hpp"

namespace modsim::testing {

struct Edge {
  NodeId from;
  NodeId to;
  double length_m;
  double speed_mps;
};

/// Nodes given as (id, x, y); segments numbered in list order from 0.
RoadNetwork make_network(std::initializer_list<std::tuple<NodeId, double, double>> nodes,
                         std::initializer_list<Edge> edges);

/// Nodes 0..n-1 on the x axis `spacing` apart, two-way, uniform speed.
RoadNetwork line_network(std::size_t n, double spacing, double speed_mps);

/// 2x2 grid: nodes 0..3 at the corners of a 100 m square, 8 directed
/// segments at 10 m/s.
RoadNetwork square_network();

/// Connected random network on `n` nodes: a bidirectional spanning chain
/// plus `extra` random directed segments. Lengths are at least the
/// Euclidean distance so the estimator stays optimistic-ish.
RoadNetwork random_network(std::size_t n, std::size_t extra, std::uint64_t seed);

TravelRequest request(RequestId id, double t, NodeId o, NodeId d);

/// Path from the temporary directory root, unique per test name.
std::string temp_dir(const std::string& name);

}  // namespace modsim::testing
