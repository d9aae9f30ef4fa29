#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "modsim/road_network.hpp"
#include "modsim/stations.hpp"

namespace modsim {

/// Dense row-major matrix of non-negative unit costs.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), values(r * c, fill) {}

  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

struct RebalancingFlow {
  std::size_t from_station = 0;  // station index
  std::size_t to_station = 0;
  int vehicle_count = 0;
  double unit_cost = 0.0;  // estimated seconds

  friend bool operator==(const RebalancingFlow&, const RebalancingFlow&) = default;
};

/// Target idle stock per station: `total` split by `weights` with
/// largest-remainder rounding, ties to the lower station index.
std::vector<int> compute_targets(std::span<const double> weights, int total);

/// Per-station supply and demand for the transportation problem.
struct StockImbalance {
  std::vector<int> supply;  // idle vehicles a station can give away
  std::vector<int> demand;  // vehicles a station is short of
};

/// surplus = expected - target, where expected stock counts idle vehicles
/// plus empty vehicles already heading to the station. Only idle vehicles
/// can be shipped, so supply is capped by the idle count.
StockImbalance compute_imbalance(std::span<const int> idle,
                                 std::span<const int> expected,
                                 std::span<const int> targets);

/// Integral minimum-cost transportation plan shipping min(sum supply,
/// sum demand) units, by successive shortest augmenting paths. `costs` is
/// supplies.size() x demands.size(). Flows come out sorted by (from, to).
/// Throws Error on negative costs or supplies.
std::vector<RebalancingFlow> solve_transportation(std::span<const int> supplies,
                                                  std::span<const int> demands,
                                                  const CostMatrix& costs);

double total_cost(std::span<const RebalancingFlow> flows);

/// Estimated station-to-station travel times.
CostMatrix station_cost_matrix(const StationLayout& layout,
                               const RoadNetwork& network,
                               const TravelTimeEstimator& estimator);

struct RebalancingDispatch {
  VehicleId vehicle = 0;
  std::size_t from_station = 0;
  std::size_t to_station = 0;
};

struct AppliedRebalancing {
  std::vector<RebalancingDispatch> dispatches;
  /// Vehicles a flow asked for that were no longer idle.
  int shortfall = 0;
};

/// Takes idle vehicles (lowest ids first) out of the depot for each flow.
AppliedRebalancing apply_rebalancing(std::span<const RebalancingFlow> flows,
                                     StationDepot& depot);

}  // namespace modsim
