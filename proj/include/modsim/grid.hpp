#pragma once

#include <cstddef>

#include "modsim/demand.hpp"
#include "modsim/road_network.hpp"

namespace modsim {

/// Rectangular two-way street grid. Node (r, c) has id r*cols + c and sits
/// at (c*spacing, r*spacing). Every `arterial_every`-th row and column is an
/// arterial; 0 disables arterials.
struct GridSpec {
  std::size_t rows = 20;
  std::size_t cols = 20;
  double spacing_m = 150.0;
  double local_speed_kmh = 50.0;
  std::size_t arterial_every = 5;
  double arterial_speed_kmh = 70.0;
};

RoadNetwork make_grid_network(const GridSpec& spec);

/// Morning commute on a grid built from `spec`: residential clusters near
/// the four corners, a business cluster at the centre and a smaller one off
/// centre. Times uniform on [start, end].
DemandConfig commute_demand_config(const GridSpec& spec,
                                   std::size_t request_count, double start,
                                   double end, std::uint64_t seed);

}  // namespace modsim
