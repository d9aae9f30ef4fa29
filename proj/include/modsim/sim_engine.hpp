#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modsim/demand.hpp"
#include "modsim/matching.hpp"
#include "modsim/road_network.hpp"
#include "modsim/stations.hpp"

namespace modsim {

enum class Mode { present, mod, mod_rideshare };

std::string_view to_string(Mode mode);
/// Accepts "present", "mod", "mod_rideshare". Throws ConfigError.
Mode parse_mode(std::string_view text);

struct ScenarioConfig {
  Mode mode = Mode::present;
  double q_max = 600.0;        // seconds, ridesharing only
  double start = 0.0;          // simulation start
  double stat_start = 1800.0;  // statistics window start (end of warm-up)
  double end = 5400.0;         // last admissible announcement, window end
  double rebalancing_period = 600.0;  // 0 disables rebalancing
  double service_time = 0.0;          // per pickup / drop-off
  std::optional<int> capacity;        // nullopt = unlimited
  double occupancy_interval = 60.0;
};

/// Throws ConfigError for inconsistent settings.
void validate(const ScenarioConfig& config);

struct TraversalRecord {
  VehicleId vehicle = 0;
  SegmentId segment = 0;
  double enter = 0.0;
  double exit = 0.0;
  int occupancy = 0;

  friend bool operator==(const TraversalRecord&, const TraversalRecord&) = default;
};

struct RequestRecord {
  RequestId request = 0;
  double announce = 0.0;
  std::optional<double> pickup;
  std::optional<double> dropoff;
  std::optional<VehicleId> vehicle;
  double baseline = 0.0;
  /// Largest estimator-evaluated delay over every plan the request was part
  /// of when that plan was adopted.
  std::optional<double> estimated_delay;
  bool via_station = false;

  bool served() const { return dropoff.has_value(); }
  /// Road-network delay: (dropoff - announce) - baseline.
  std::optional<double> realized_delay() const {
    if (!dropoff) return std::nullopt;
    return (*dropoff - announce) - baseline;
  }
};

struct RebalancingRecord {
  double tick = 0.0;
  StationId from = 0;
  StationId to = 0;
  int count = 0;
};

struct OccupancySample {
  double time = 0.0;
  VehicleId vehicle = 0;
  int occupancy = 0;
};

/// Fleet bookkeeping at an event boundary.
struct ConservationAudit {
  double time = 0.0;
  int parked = 0;       // idle vehicles in station depots
  int empty_moving = 0; // returning or rebalancing, no passengers or orders
  int serving = 0;      // has orders or passengers
  int total = 0;        // fleet size
  bool depot_consistent = true;  // depot contents match vehicle states

  bool balanced() const {
    return depot_consistent && parked + empty_moving + serving == total;
  }
};

struct SimTrace {
  Mode mode = Mode::present;
  double start = 0.0;
  double stat_start = 0.0;
  double end = 0.0;
  double finish = 0.0;  // time of the last processed event
  double q_max = 0.0;
  std::size_t fleet_size = 0;

  std::vector<TraversalRecord> traversals;
  std::vector<RequestRecord> requests;
  std::vector<RebalancingRecord> rebalancing;
  std::vector<OccupancySample> occupancy;
  std::vector<ConservationAudit> audits;

  std::size_t unserved = 0;
  int rebalancing_shortfall = 0;
};

/// Kinematics of a vehicle along a route: segment k is entered when segment
/// k-1 is exited and takes length / speed limit seconds.
std::vector<TraversalRecord> advance_vehicle(const RoadNetwork& network,
                                             VehicleId vehicle,
                                             std::span<const SegmentId> route,
                                             double enter_time, int occupancy);

/// Runs one scenario to completion. Announcements are accepted within
/// [start, end]; afterwards the simulation drains until every vehicle has
/// finished its plan and parked (or, in present mode, arrived).
///
/// present: one dedicated vehicle per request along the fastest route.
/// mod: station dispatch only; empty vehicles return to the nearest station;
///   periodic rebalancing.
/// mod_rideshare: insertion heuristic over the whole fleet with q_max;
///   parked, returning and rebalancing vehicles are matchable. A request
///   with no feasible insertion is unserved.
SimTrace run_scenario(const ScenarioConfig& config, const RoadNetwork& network,
                      std::span<const TravelRequest> demand,
                      const StationLayout& layout,
                      const TravelTimeEstimator& estimator);

/// Smallest total fleet, split over stations proportionally to the requests
/// originating in each station's region, for which a `mod` run leaves no
/// request unserved. Binary search over [1, |demand|]; returns per-station
/// stocks. Throws Error when even |demand| vehicles do not suffice.
std::vector<int> size_fleet(const ScenarioConfig& config,
                            const RoadNetwork& network,
                            std::span<const TravelRequest> demand,
                            const StationLayout& layout,
                            const TravelTimeEstimator& estimator);

/// `layout` with the given per-station stocks.
StationLayout with_stocks(StationLayout layout, std::span<const int> stocks);

/// Per-station stocks for a total fleet, proportional to region demand.
std::vector<int> proportional_stocks(int total_fleet,
                                     const StationLayout& layout,
                                     std::span<const TravelRequest> demand,
                                     const RoadNetwork& network,
                                     const TravelTimeEstimator& estimator);

}  // namespace modsim
