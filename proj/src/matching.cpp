#include "modsim/matching.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

#include "modsim/errors.hpp"

namespace modsim {
namespace {

std::vector<std::size_t> by_vehicle_id(std::span<const VehicleState> fleet) {
  std::vector<std::size_t> order(fleet.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fleet[a].id < fleet[b].id;
  });
  return order;
}

/// Candidate evaluation for one vehicle without materializing plans. The
/// arithmetic mirrors plan_cost and plan_timeline operation for operation,
/// so results are bit-identical to evaluating the materialized plan.
class InsertionScanner {
 public:
  InsertionScanner(const VehicleState& vehicle, const ServiceRequest& request,
                   const MatchContext& ctx)
      : vehicle_(vehicle), request_(request), ctx_(ctx) {
    const auto& orders = vehicle.plan.orders;
    positions_.reserve(orders.size());
    for (const auto& o : orders) {
      positions_.push_back(&ctx.network.position(o.location));
    }
    pickup_pos_ = &ctx.network.position(request.origin);
    dropoff_pos_ = &ctx.network.position(request.destination);
    anchor_pos_ = &ctx.network.position(vehicle.anchor);
  }

  double base_cost() const {
    double total = vehicle_.anchor_distance;
    const Point* prev = anchor_pos_;
    for (const auto* p : positions_) {
      total += euclidean(*prev, *p);
      prev = p;
    }
    return total;
  }

  /// Cost of the plan with the pickup at `p` and the dropoff at `q` (new
  /// plan positions), or nullopt when capacity or a delay bound fails.
  std::optional<double> evaluate(std::size_t p, std::size_t q) const {
    const auto& orders = vehicle_.plan.orders;
    const std::size_t length = orders.size() + 2;
    double total = vehicle_.anchor_distance;
    double t = ctx_.now + vehicle_.anchor_delay;
    std::size_t load = vehicle_.onboard.size();
    const Point* prev = anchor_pos_;
    for (std::size_t k = 0; k < length; ++k) {
      const Point* here;
      OrderKind kind;
      const ServiceRequest* served;
      if (k == p) {
        here = pickup_pos_;
        kind = OrderKind::pickup;
        served = &request_;
      } else if (k == q) {
        here = dropoff_pos_;
        kind = OrderKind::dropoff;
        served = &request_;
      } else {
        const std::size_t src = k < p ? k : (k < q ? k - 1 : k - 2);
        here = positions_[src];
        kind = orders[src].kind;
        served = nullptr;
        if (kind == OrderKind::dropoff) {
          served = &ctx_.requests.at(orders[src].request);
        }
      }
      total += euclidean(*prev, *here);
      t += ctx_.estimator.estimate(*prev, *here);
      t += ctx_.service_time;
      prev = here;
      if (kind == OrderKind::pickup) {
        ++load;
        if (vehicle_.capacity && load > static_cast<std::size_t>(*vehicle_.capacity)) {
          return std::nullopt;
        }
      } else {
        --load;
        const double delay =
            (t - served->announcement_time) - served->baseline;
        if (delay > ctx_.q_max) return std::nullopt;
      }
    }
    return total;
  }

  /// True when no insertion can meet the new request's delay bound. Only
  /// sound when the estimator is subadditive (non-negative intercept).
  bool hopeless() const {
    if (ctx_.estimator.intercept < 0.0) return false;
    const double earliest_dropoff =
        ctx_.now + vehicle_.anchor_delay +
        ctx_.estimator.estimate(*anchor_pos_, *pickup_pos_) +
        ctx_.estimator.estimate(*pickup_pos_, *dropoff_pos_) +
        2.0 * ctx_.service_time;
    const double lower_bound =
        (earliest_dropoff - request_.announcement_time) - request_.baseline;
    return lower_bound > ctx_.q_max + 1e-6 * std::max(1.0, std::abs(ctx_.q_max));
  }

 private:
  const VehicleState& vehicle_;
  const ServiceRequest& request_;
  const MatchContext& ctx_;
  std::vector<const Point*> positions_;
  const Point* pickup_pos_;
  const Point* dropoff_pos_;
  const Point* anchor_pos_;
};

PlanOrder pickup_of(const ServiceRequest& r) {
  return {OrderKind::pickup, r.id, r.origin};
}
PlanOrder dropoff_of(const ServiceRequest& r) {
  return {OrderKind::dropoff, r.id, r.destination};
}

}  // namespace

void RequestBook::add(const ServiceRequest& request) {
  entries_[request.id] = request;
}

const ServiceRequest& RequestBook::at(RequestId id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw PlanError(fmt::format("unknown request {}", id));
  }
  return it->second;
}

std::string plan_violation(const VehicleState& vehicle, const VehiclePlan& plan,
                           const RequestBook* requests) {
  std::unordered_set<RequestId> onboard(vehicle.onboard.begin(),
                                        vehicle.onboard.end());
  std::unordered_set<RequestId> picked, dropped;
  std::size_t load = onboard.size();
  if (vehicle.capacity && load > static_cast<std::size_t>(*vehicle.capacity)) {
    return fmt::format("vehicle {} carries {} passengers over capacity {}",
                       vehicle.id, load, *vehicle.capacity);
  }
  for (const auto& order : plan.orders) {
    const auto r = order.request;
    if (order.kind == OrderKind::pickup) {
      if (onboard.contains(r)) {
        return fmt::format("request {} is already on board", r);
      }
      if (!picked.insert(r).second) {
        return fmt::format("request {} is picked up twice", r);
      }
      if (requests && requests->at(r).origin != order.location) {
        return fmt::format("pickup of request {} not at its origin", r);
      }
      ++load;
      if (vehicle.capacity && load > static_cast<std::size_t>(*vehicle.capacity)) {
        return fmt::format("capacity {} exceeded", *vehicle.capacity);
      }
    } else {
      if (!onboard.contains(r) && !picked.contains(r)) {
        return fmt::format("request {} dropped off before pickup", r);
      }
      if (!dropped.insert(r).second) {
        return fmt::format("request {} is dropped off twice", r);
      }
      if (requests && requests->at(r).destination != order.location) {
        return fmt::format("drop-off of request {} not at its destination", r);
      }
      --load;
    }
  }
  for (auto r : onboard) {
    if (!dropped.contains(r)) {
      return fmt::format("on-board request {} has no drop-off", r);
    }
  }
  for (auto r : picked) {
    if (!dropped.contains(r)) {
      return fmt::format("request {} has no drop-off after pickup", r);
    }
  }
  return {};
}

double plan_cost(const VehicleState& vehicle, const VehiclePlan& plan,
                 const MatchContext& ctx) {
  if (auto why = plan_violation(vehicle, plan, &ctx.requests); !why.empty()) {
    throw PlanError("invalid plan: " + why);
  }
  double total = vehicle.anchor_distance;
  const Point* prev = &ctx.network.position(vehicle.anchor);
  for (const auto& order : plan.orders) {
    const Point* here = &ctx.network.position(order.location);
    total += euclidean(*prev, *here);
    prev = here;
  }
  return total;
}

std::vector<double> plan_timeline(const VehicleState& vehicle,
                                  const VehiclePlan& plan,
                                  const MatchContext& ctx) {
  std::vector<double> times;
  times.reserve(plan.size());
  double t = ctx.now + vehicle.anchor_delay;
  const Point* prev = &ctx.network.position(vehicle.anchor);
  for (const auto& order : plan.orders) {
    const Point* here = &ctx.network.position(order.location);
    t += ctx.estimator.estimate(*prev, *here);
    t += ctx.service_time;
    times.push_back(t);
    prev = here;
  }
  return times;
}

double request_delay(RequestId request, const VehiclePlan& plan,
                     const VehicleState& vehicle, const MatchContext& ctx) {
  const auto it =
      std::find_if(plan.orders.begin(), plan.orders.end(), [&](const auto& o) {
        return o.kind == OrderKind::dropoff && o.request == request;
      });
  if (it == plan.orders.end()) {
    throw PlanError(
        fmt::format("plan of vehicle {} does not serve request {}", vehicle.id,
                    request));
  }
  const auto times = plan_timeline(vehicle, plan, ctx);
  const auto& r = ctx.requests.at(request);
  return (times[static_cast<std::size_t>(it - plan.orders.begin())] -
          r.announcement_time) -
         r.baseline;
}

std::vector<std::pair<RequestId, double>> plan_delays(
    const VehicleState& vehicle, const VehiclePlan& plan,
    const MatchContext& ctx) {
  const auto times = plan_timeline(vehicle, plan, ctx);
  std::vector<std::pair<RequestId, double>> out;
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const auto& order = plan.orders[k];
    if (order.kind != OrderKind::dropoff) continue;
    const auto& r = ctx.requests.at(order.request);
    out.emplace_back(order.request,
                     (times[k] - r.announcement_time) - r.baseline);
  }
  return out;
}

std::vector<Insertion> enumerate_insertions(const VehiclePlan& plan,
                                            const ServiceRequest& request) {
  const auto l = plan.size();
  std::vector<Insertion> out;
  out.reserve((l + 1) * (l + 2) / 2);
  for (std::size_t p = 0; p <= l; ++p) {
    VehiclePlan with_pickup = plan;
    with_pickup.orders.insert(with_pickup.orders.begin() + static_cast<std::ptrdiff_t>(p),
                              pickup_of(request));
    for (std::size_t q = p + 1; q <= l + 1; ++q) {
      Insertion ins{p, q, with_pickup};
      ins.plan.orders.insert(ins.plan.orders.begin() + static_cast<std::ptrdiff_t>(q),
                             dropoff_of(request));
      out.push_back(std::move(ins));
    }
  }
  return out;
}

std::optional<Assignment> match_request(std::span<const VehicleState> fleet,
                                        RequestId request,
                                        const MatchContext& ctx) {
  const auto& r = ctx.requests.at(request);
  std::optional<Assignment> best;
  std::size_t best_vehicle = 0;
  for (auto idx : by_vehicle_id(fleet)) {
    const auto& vehicle = fleet[idx];
    InsertionScanner scan(vehicle, r, ctx);
    if (scan.hopeless()) continue;
    if (!is_valid_plan(vehicle, vehicle.plan)) continue;
    const double base = scan.base_cost();
    const auto l = vehicle.plan.size();
    for (std::size_t p = 0; p <= l; ++p) {
      for (std::size_t q = p + 1; q <= l + 1; ++q) {
        const auto cost = scan.evaluate(p, q);
        if (!cost) continue;
        const double delta = *cost - base;
        if (!best || delta < best->cost_delta) {
          best = Assignment{request, vehicle.id, p, q, {}, delta, std::nullopt};
          best_vehicle = idx;
        }
      }
    }
  }
  if (best) {
    auto& plan = best->plan.orders;
    plan = fleet[best_vehicle].plan.orders;
    plan.insert(plan.begin() + static_cast<std::ptrdiff_t>(best->pickup_index),
                pickup_of(r));
    plan.insert(plan.begin() + static_cast<std::ptrdiff_t>(best->dropoff_index),
                dropoff_of(r));
  }
  return best;
}

std::optional<Assignment> dispatch_from_station(RequestId request,
                                                const StationLayout& layout,
                                                StationDepot& depot,
                                                const MatchContext& ctx) {
  const auto& r = ctx.requests.at(request);
  for (auto s : stations_by_estimated_time(layout, ctx.network, ctx.estimator,
                                           r.origin)) {
    const auto vehicle_id = depot.take_lowest(s);
    if (!vehicle_id) continue;
    VehicleState parked;
    parked.id = *vehicle_id;
    parked.anchor = layout.stations[s].node;
    parked.home_station = layout.stations[s].id;
    Assignment a;
    a.request = request;
    a.vehicle = *vehicle_id;
    a.pickup_index = 0;
    a.dropoff_index = 1;
    a.plan.orders = {pickup_of(r), dropoff_of(r)};
    a.cost_delta = plan_cost(parked, a.plan, ctx);
    a.station_index = s;
    return a;
  }
  return std::nullopt;
}

std::optional<Assignment> brute_force_oracle(
    std::span<const VehicleState> fleet, RequestId request,
    const MatchContext& ctx) {
  std::size_t total_orders = 0;
  for (const auto& v : fleet) total_orders += v.plan.size();
  if (total_orders > kOracleOrderLimit) {
    throw Error(fmt::format("oracle guard: {} orders exceed the limit of {}",
                            total_orders, kOracleOrderLimit));
  }
  const auto& r = ctx.requests.at(request);

  std::vector<const VehicleState*> ordered;
  for (const auto& v : fleet) ordered.push_back(&v);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->id < b->id; });

  std::optional<Assignment> best;
  for (const auto* vehicle : ordered) {
    double before = 0.0;
    try {
      before = plan_cost(*vehicle, vehicle->plan, ctx);
    } catch (const PlanError&) {
      continue;
    }
    for (auto& ins : enumerate_insertions(vehicle->plan, r)) {
      if (!is_valid_plan(*vehicle, ins.plan, &ctx.requests)) continue;
      bool feasible = true;
      for (const auto& order : ins.plan.orders) {
        if (order.kind != OrderKind::dropoff) continue;
        if (request_delay(order.request, ins.plan, *vehicle, ctx) > ctx.q_max) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
      const double delta = plan_cost(*vehicle, ins.plan, ctx) - before;
      if (!best || delta < best->cost_delta) {
        best = Assignment{request,          vehicle->id,       ins.pickup_index,
                          ins.dropoff_index, std::move(ins.plan), delta,
                          std::nullopt};
      }
    }
  }
  return best;
}

}  // namespace modsim
