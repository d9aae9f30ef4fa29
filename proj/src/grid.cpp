#include "modsim/grid.hpp"

#include <algorithm>
#include <utility>

#include "modsim/errors.hpp"

namespace modsim {

RoadNetwork make_grid_network(const GridSpec& spec) {
  if (spec.rows < 2 || spec.cols < 2) {
    throw ConfigError("grid needs at least 2 rows and 2 columns");
  }
  if (!(spec.spacing_m > 0.0)) throw ConfigError("grid spacing must be positive");
  if (!(spec.local_speed_kmh > 0.0) || !(spec.arterial_speed_kmh > 0.0)) {
    throw ConfigError("grid speeds must be positive");
  }
  auto id = [&](std::size_t r, std::size_t c) {
    return static_cast<NodeId>(r * spec.cols + c);
  };
  auto arterial = [&](std::size_t line) {
    return spec.arterial_every != 0 && line % spec.arterial_every == 0;
  };

  std::vector<Node> nodes;
  nodes.reserve(spec.rows * spec.cols);
  for (std::size_t r = 0; r < spec.rows; ++r) {
    for (std::size_t c = 0; c < spec.cols; ++c) {
      nodes.push_back({id(r, c), {static_cast<double>(c) * spec.spacing_m,
                                  static_cast<double>(r) * spec.spacing_m}});
    }
  }

  std::vector<RoadSegment> segments;
  auto link = [&](NodeId a, NodeId b, bool is_arterial) {
    const double kmh =
        is_arterial ? spec.arterial_speed_kmh : spec.local_speed_kmh;
    const char* cls = is_arterial ? "primary" : "residential";
    for (auto [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
      segments.push_back({static_cast<SegmentId>(segments.size()), from, to,
                          spec.spacing_m, kmh_to_mps(kmh), cls});
    }
  };
  for (std::size_t r = 0; r < spec.rows; ++r) {
    for (std::size_t c = 0; c < spec.cols; ++c) {
      if (c + 1 < spec.cols) link(id(r, c), id(r, c + 1), arterial(r));
      if (r + 1 < spec.rows) link(id(r, c), id(r + 1, c), arterial(c));
    }
  }
  return RoadNetwork(std::move(nodes), std::move(segments));
}

DemandConfig commute_demand_config(const GridSpec& spec,
                                   std::size_t request_count, double start,
                                   double end, std::uint64_t seed) {
  const double w = static_cast<double>(spec.cols - 1) * spec.spacing_m;
  const double h = static_cast<double>(spec.rows - 1) * spec.spacing_m;
  const double home_sigma = 0.08 * std::min(w, h);
  const double work_sigma = 0.06 * std::min(w, h);

  DemandConfig config;
  config.start = start;
  config.end = end;
  config.request_count = request_count;
  config.homogeneous = true;
  config.seed = seed;
  config.origin_clusters = {
      {{0.15 * w, 0.15 * h}, home_sigma, 0.25},
      {{0.85 * w, 0.15 * h}, home_sigma, 0.25},
      {{0.15 * w, 0.85 * h}, home_sigma, 0.25},
      {{0.85 * w, 0.85 * h}, home_sigma, 0.25},
  };
  config.destination_clusters = {
      {{0.5 * w, 0.5 * h}, work_sigma, 0.75},
      {{0.7 * w, 0.4 * h}, work_sigma, 0.25},
  };
  return config;
}

}  // namespace modsim
