#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "modsim/demand.hpp"
#include "modsim/road_network.hpp"
#include "modsim/stations.hpp"

namespace modsim {

enum class OrderKind : std::uint8_t { pickup, dropoff };

struct PlanOrder {
  OrderKind kind = OrderKind::pickup;
  RequestId request = 0;
  NodeId location = 0;

  friend bool operator==(const PlanOrder&, const PlanOrder&) = default;
};

struct VehiclePlan {
  std::vector<PlanOrder> orders;

  std::size_t size() const { return orders.size(); }
  bool empty() const { return orders.empty(); }
  friend bool operator==(const VehiclePlan&, const VehiclePlan&) = default;
};

/// Request data cached at announcement time.
struct ServiceRequest {
  RequestId id = 0;
  double announcement_time = 0.0;
  NodeId origin = 0;
  NodeId destination = 0;
  double baseline = 0.0;  // fastest-route duration origin -> destination
};

class RequestBook {
 public:
  void add(const ServiceRequest& request);
  const ServiceRequest& at(RequestId id) const;
  bool contains(RequestId id) const { return entries_.contains(id); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<RequestId, ServiceRequest> entries_;
};

/// Matching-relevant vehicle state. A vehicle in the middle of a segment is
/// committed to finish it: `anchor` is the segment's end node, reached after
/// `anchor_delay` seconds and `anchor_distance` meters. A vehicle at a node
/// has zero delay and distance.
struct VehicleState {
  VehicleId id = 0;
  NodeId anchor = 0;
  double anchor_delay = 0.0;
  double anchor_distance = 0.0;
  std::vector<RequestId> onboard;
  VehiclePlan plan;
  std::optional<StationId> home_station;
  std::optional<int> capacity;  // nullopt = unlimited
};

struct MatchContext {
  const RoadNetwork& network;
  const TravelTimeEstimator& estimator;
  const RequestBook& requests;
  double now = 0.0;
  double q_max = 0.0;
  double service_time = 0.0;  // per order, seconds
};

/// Empty string when valid, otherwise a description of the first violation.
/// Checks pickup/dropoff pairing and order, onboard coverage, capacity, and
/// (when `requests` is given) that order locations match the request.
std::string plan_violation(const VehicleState& vehicle, const VehiclePlan& plan,
                           const RequestBook* requests = nullptr);

inline bool is_valid_plan(const VehicleState& vehicle, const VehiclePlan& plan,
                          const RequestBook* requests = nullptr) {
  return plan_violation(vehicle, plan, requests).empty();
}

/// Operational cost s_v: remaining distance to the anchor plus straight-line
/// legs through the order locations. Throws PlanError for invalid plans.
double plan_cost(const VehicleState& vehicle, const VehiclePlan& plan,
                 const MatchContext& ctx);

/// Estimated completion time of each order: legs timed by the estimator,
/// plus the per-order service time.
std::vector<double> plan_timeline(const VehicleState& vehicle,
                                  const VehiclePlan& plan,
                                  const MatchContext& ctx);

/// q_r = (t_dropoff - t_announce) - t_baseline under `plan`. Raw value, not
/// clamped. Throws PlanError when the plan does not drop off `request`.
double request_delay(RequestId request, const VehiclePlan& plan,
                     const VehicleState& vehicle, const MatchContext& ctx);

/// (request, delay) for every dropoff in the plan, in plan order.
std::vector<std::pair<RequestId, double>> plan_delays(
    const VehicleState& vehicle, const VehiclePlan& plan,
    const MatchContext& ctx);

struct Insertion {
  std::size_t pickup_index = 0;   // position of the pickup in the new plan
  std::size_t dropoff_index = 0;  // position of the dropoff in the new plan
  VehiclePlan plan;
};

/// Every order-preserving placement of the request's pickup and dropoff:
/// (l+1)(l+2)/2 plans for a plan of length l, ordered by (pickup, dropoff).
std::vector<Insertion> enumerate_insertions(const VehiclePlan& plan,
                                            const ServiceRequest& request);

struct Assignment {
  RequestId request = 0;
  VehicleId vehicle = 0;
  std::size_t pickup_index = 0;
  std::size_t dropoff_index = 0;
  VehiclePlan plan;
  double cost_delta = 0.0;  // meters
  /// Set when the vehicle was dispatched from a station stock.
  std::optional<std::size_t> station_index;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Insertion heuristic. Over all vehicles (ascending id) and insertions,
/// picks the least cost increase such that the plan is valid, capacity
/// holds and every request dropped off by the new plan has estimated delay
/// <= ctx.q_max. Ties go to (vehicle id, pickup index, dropoff index).
/// `request` must be registered in ctx.requests. nullopt when nothing is
/// feasible.
std::optional<Assignment> match_request(std::span<const VehicleState> fleet,
                                        RequestId request,
                                        const MatchContext& ctx);

/// Dispatches the lowest-id idle vehicle from the nearest station with
/// stock (stations tried in estimated-time order), removing it from the
/// depot. Does not check the delay bound. nullopt when all are empty.
std::optional<Assignment> dispatch_from_station(RequestId request,
                                                const StationLayout& layout,
                                                StationDepot& depot,
                                                const MatchContext& ctx);

/// Largest total plan size the oracle accepts.
inline constexpr std::size_t kOracleOrderLimit = 12;

/// Exhaustive reference for match_request: materializes every candidate
/// plan and evaluates it through plan_violation, plan_cost and
/// request_delay. Throws Error when the fleet holds more than
/// kOracleOrderLimit orders.
std::optional<Assignment> brute_force_oracle(
    std::span<const VehicleState> fleet, RequestId request,
    const MatchContext& ctx);

}  // namespace modsim
