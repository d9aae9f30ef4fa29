#include "modsim/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>

#include "modsim/errors.hpp"
#include "modsim/rebalancing.hpp"

namespace modsim {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::present:
      return "present";
    case Mode::mod:
      return "mod";
    case Mode::mod_rideshare:
      return "mod_rideshare";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  if (text == "present") return Mode::present;
  if (text == "mod") return Mode::mod;
  if (text == "mod_rideshare") return Mode::mod_rideshare;
  throw ConfigError(fmt::format(
      "unknown mode '{}' (expected present, mod or mod_rideshare)", text));
}

void validate(const ScenarioConfig& config) {
  if (!(config.stat_start >= config.start)) {
    throw ConfigError("stat_start must not precede start");
  }
  if (!(config.end > config.stat_start)) {
    throw ConfigError("end must be after stat_start");
  }
  if (config.mode == Mode::mod_rideshare && !(config.q_max > 0.0)) {
    throw ConfigError("q_max must be positive in mod_rideshare mode");
  }
  if (!(config.rebalancing_period >= 0.0)) {
    throw ConfigError("rebalancing_period must be >= 0");
  }
  if (!(config.service_time >= 0.0)) {
    throw ConfigError("service_time must be >= 0");
  }
  if (config.capacity && *config.capacity < 1) {
    throw ConfigError("capacity must be at least 1");
  }
  if (!(config.occupancy_interval > 0.0)) {
    throw ConfigError("occupancy_interval must be positive");
  }
}

std::vector<TraversalRecord> advance_vehicle(const RoadNetwork& network,
                                             VehicleId vehicle,
                                             std::span<const SegmentId> route,
                                             double enter_time, int occupancy) {
  std::vector<TraversalRecord> out;
  out.reserve(route.size());
  double t = enter_time;
  for (auto id : route) {
    const double exit = t + network.segment(id).traversal_time();
    out.push_back({vehicle, id, t, exit, occupancy});
    t = exit;
  }
  return out;
}

namespace {

// Lower value runs first among events with the same timestamp. Vehicle
// events carry pickups and drop-offs.
enum class EventKind : int { vehicle = 0, request = 1, rebalance = 2, sample = 3 };

struct Event {
  double time;
  EventKind kind;
  std::int64_t entity;
  std::uint64_t seq;
};

struct RunsLater {
  bool operator()(const Event& a, const Event& b) const {
    return std::tie(a.time, a.kind, a.entity, a.seq) >
           std::tie(b.time, b.kind, b.entity, b.seq);
  }
};

enum class Status { parked, moving, dwelling, released };
enum class Purpose { none, serve, to_station };

struct SimVehicle {
  VehicleId id = 0;
  Status status = Status::parked;
  NodeId node = 0;  // last node reached
  std::size_t segment = 0;
  double segment_enter = 0.0;
  double segment_exit = 0.0;
  int segment_occupancy = 0;
  double wake = 0.0;
  std::optional<PlanOrder> in_service;

  std::vector<SegmentId> route;
  std::size_t route_pos = 0;
  NodeId route_target = 0;
  bool route_valid = false;

  VehiclePlan plan;
  std::vector<RequestId> onboard;
  Purpose purpose = Purpose::none;
  std::optional<std::size_t> station;  // parked at, or heading to
};

class Simulation {
 public:
  Simulation(const ScenarioConfig& config, const RoadNetwork& network,
             std::span<const TravelRequest> demand, const StationLayout& layout,
             const TravelTimeEstimator& estimator)
      : config_(config),
        network_(network),
        demand_(demand),
        layout_(layout),
        estimator_(estimator),
        router_(network),
        depot_(layout.size()) {}

  SimTrace run();

 private:
  MatchContext context(double now) const {
    return MatchContext{network_, estimator_, book_, now, config_.q_max,
                        config_.service_time};
  }

  void schedule(double t, EventKind kind, std::int64_t entity) {
    queue_.push(Event{t, kind, entity, seq_++});
  }

  void on_request(std::size_t index, double now);
  void on_vehicle(VehicleId id, double now);
  void on_rebalance(double now);
  void on_sample(double now);

  void step(SimVehicle& v, double now);
  void begin_order(SimVehicle& v, const PlanOrder& order);
  void finish_order(SimVehicle& v, const PlanOrder& order, double now);
  void park(SimVehicle& v);
  VehicleState matching_state(const SimVehicle& v, double now) const;
  void adopt(const Assignment& a, double now);
  void audit(double now);

  RequestRecord& record(RequestId id) {
    return trace_.requests[record_index_.at(id)];
  }

  const ScenarioConfig& config_;
  const RoadNetwork& network_;
  std::span<const TravelRequest> demand_;
  const StationLayout& layout_;
  const TravelTimeEstimator& estimator_;
  Router router_;

  StationDepot depot_;
  std::vector<SimVehicle> vehicles_;
  RequestBook book_;
  std::unordered_map<RequestId, std::size_t> record_index_;
  std::vector<double> region_weights_;
  CostMatrix station_costs_;

  std::priority_queue<Event, std::vector<Event>, RunsLater> queue_;
  std::uint64_t seq_ = 0;
  SimTrace trace_;
};

SimTrace Simulation::run() {
  validate(config_);
  const bool station_based = config_.mode != Mode::present;
  if (station_based && layout_.empty()) {
    throw ConfigError(fmt::format("{} mode needs at least one station",
                                  to_string(config_.mode)));
  }
  for (const auto& r : demand_) {
    if (r.announcement_time < config_.start || r.announcement_time > config_.end) {
      throw ConfigError(fmt::format(
          "request {} announced at {} outside the horizon [{}, {}]", r.id,
          r.announcement_time, config_.start, config_.end));
    }
    if (!network_.has_node(r.origin) || !network_.has_node(r.destination)) {
      throw ConfigError(fmt::format("request {} references unknown nodes", r.id));
    }
  }

  trace_.mode = config_.mode;
  trace_.start = config_.start;
  trace_.stat_start = config_.stat_start;
  trace_.end = config_.end;
  trace_.q_max = config_.mode == Mode::mod_rideshare ? config_.q_max : 0.0;
  trace_.finish = config_.start;

  if (station_based) {
    VehicleId next = 0;
    for (std::size_t s = 0; s < layout_.size(); ++s) {
      for (int k = 0; k < layout_.stations[s].initial_stock; ++k) {
        SimVehicle v;
        v.id = next++;
        v.node = layout_.stations[s].node;
        v.station = s;
        vehicles_.push_back(v);
        depot_.park(s, v.id);
      }
    }
    trace_.fleet_size = vehicles_.size();
    region_weights_ = origin_weights(layout_, demand_, network_, estimator_);
    station_costs_ = station_cost_matrix(layout_, network_, estimator_);
    if (config_.rebalancing_period > 0.0) {
      for (double t = config_.start + config_.rebalancing_period;
           t <= config_.end; t += config_.rebalancing_period) {
        schedule(t, EventKind::rebalance, 0);
      }
    }
  }
  for (std::size_t i = 0; i < demand_.size(); ++i) {
    schedule(demand_[i].announcement_time, EventKind::request,
             static_cast<std::int64_t>(i));
  }
  for (std::size_t k = 0;; ++k) {
    const double t = config_.start + static_cast<double>(k) * config_.occupancy_interval;
    if (t > config_.end) break;
    schedule(t, EventKind::sample, 0);
  }

  audit(config_.start);
  while (!queue_.empty()) {
    const auto event = queue_.top();
    queue_.pop();
    trace_.finish = std::max(trace_.finish, event.time);
    switch (event.kind) {
      case EventKind::vehicle:
        on_vehicle(event.entity, event.time);
        break;
      case EventKind::request:
        on_request(static_cast<std::size_t>(event.entity), event.time);
        break;
      case EventKind::rebalance:
        on_rebalance(event.time);
        break;
      case EventKind::sample:
        on_sample(event.time);
        break;
    }
  }
  audit(trace_.finish);
  if (config_.mode == Mode::present) trace_.fleet_size = vehicles_.size();
  return std::move(trace_);
}

void Simulation::on_request(std::size_t index, double now) {
  const auto& r = demand_[index];
  const double baseline = router_.fastest_path(r.origin, r.destination).duration;
  book_.add({r.id, r.announcement_time, r.origin, r.destination, baseline});
  record_index_[r.id] = trace_.requests.size();
  RequestRecord rec;
  rec.request = r.id;
  rec.announce = r.announcement_time;
  rec.baseline = baseline;
  trace_.requests.push_back(rec);

  if (config_.mode == Mode::present) {
    SimVehicle v;
    v.id = static_cast<VehicleId>(vehicles_.size());
    v.status = Status::moving;
    v.node = r.origin;
    v.plan.orders = {{OrderKind::pickup, r.id, r.origin},
                     {OrderKind::dropoff, r.id, r.destination}};
    v.purpose = Purpose::serve;
    vehicles_.push_back(std::move(v));
    record(r.id).vehicle = vehicles_.back().id;
    step(vehicles_.back(), now);
    return;
  }

  const auto ctx = context(now);
  std::optional<Assignment> assignment;
  if (config_.mode == Mode::mod_rideshare) {
    std::vector<VehicleState> fleet;
    fleet.reserve(vehicles_.size());
    for (const auto& v : vehicles_) {
      if (v.status == Status::released) continue;
      // Idle vehicles at one station are interchangeable; the lowest id
      // would win any tie, so it stands in for the whole stock.
      if (v.status == Status::parked &&
          *depot_.idle(*v.station).begin() != v.id) {
        continue;
      }
      fleet.push_back(matching_state(v, now));
    }
    assignment = match_request(fleet, r.id, ctx);
  }
  // A rideshare scan already covers one parked vehicle per stocked station,
  // so a station dispatch there could only break the delay bound.
  if (!assignment && config_.mode == Mode::mod) {
    assignment = dispatch_from_station(r.id, layout_, depot_, ctx);
  }
  if (!assignment) {
    ++trace_.unserved;
    return;
  }
  adopt(*assignment, now);
}

void Simulation::adopt(const Assignment& a, double now) {
  auto& v = vehicles_.at(static_cast<std::size_t>(a.vehicle));
  const auto before = matching_state(v, now);
  const auto ctx = context(now);
  for (const auto& [request, delay] : plan_delays(before, a.plan, ctx)) {
    auto& rec = record(request);
    rec.estimated_delay = std::max(rec.estimated_delay.value_or(delay), delay);
  }
  auto& rec = record(a.request);
  rec.vehicle = v.id;
  rec.via_station = a.station_index.has_value();

  const bool was_parked = v.status == Status::parked;
  if (was_parked && !a.station_index) {
    if (!depot_.remove(*v.station, v.id)) {
      throw std::logic_error(
          fmt::format("vehicle {} missing from its station depot", v.id));
    }
  }
  v.plan = a.plan;
  v.purpose = Purpose::serve;
  v.route_valid = false;
  if (was_parked) {
    v.status = Status::moving;
    step(v, now);
  }
}

VehicleState Simulation::matching_state(const SimVehicle& v, double now) const {
  VehicleState s;
  s.id = v.id;
  s.onboard = v.onboard;
  s.plan = v.plan;
  s.capacity = config_.capacity;
  if (v.station) s.home_station = layout_.stations[*v.station].id;
  switch (v.status) {
    case Status::moving: {
      const auto& seg = network_.segments()[v.segment];
      s.anchor = seg.to;
      s.anchor_delay = std::max(0.0, v.segment_exit - now);
      s.anchor_distance = std::clamp(
          seg.length_m * (s.anchor_delay / seg.traversal_time()), 0.0,
          seg.length_m);
      break;
    }
    case Status::dwelling:
      s.anchor = v.node;
      s.anchor_delay = std::max(0.0, v.wake - now);
      break;
    case Status::parked:
    case Status::released:
      s.anchor = v.node;
      break;
  }
  return s;
}

void Simulation::begin_order(SimVehicle& v, const PlanOrder& order) {
  if (order.kind == OrderKind::pickup) {
    v.onboard.push_back(order.request);
  } else {
    const auto it = std::find(v.onboard.begin(), v.onboard.end(), order.request);
    if (it == v.onboard.end()) {
      throw std::logic_error(fmt::format(
          "vehicle {} drops off request {} it does not carry", v.id,
          order.request));
    }
    v.onboard.erase(it);
  }
}

void Simulation::finish_order(SimVehicle& /*v*/, const PlanOrder& order,
                              double now) {
  auto& rec = record(order.request);
  if (order.kind == OrderKind::pickup) {
    rec.pickup = now;
  } else {
    rec.dropoff = now;
  }
}

void Simulation::park(SimVehicle& v) {
  v.status = Status::parked;
  v.purpose = Purpose::none;
  v.route_valid = false;
  depot_.park(*v.station, v.id);
}

void Simulation::step(SimVehicle& v, double now) {
  while (true) {
    if (!v.plan.empty() && v.plan.orders.front().location == v.node) {
      const auto order = v.plan.orders.front();
      v.plan.orders.erase(v.plan.orders.begin());
      begin_order(v, order);
      if (config_.service_time > 0.0) {
        v.in_service = order;
        v.status = Status::dwelling;
        v.wake = now + config_.service_time;
        schedule(v.wake, EventKind::vehicle, v.id);
        return;
      }
      finish_order(v, order, now);
      continue;
    }

    NodeId target = 0;
    if (!v.plan.empty()) {
      v.purpose = Purpose::serve;
      target = v.plan.orders.front().location;
    } else if (config_.mode == Mode::present) {
      v.status = Status::released;
      return;
    } else {
      if (v.purpose != Purpose::to_station) {
        const auto& s = nearest_station(layout_, network_, estimator_, v.node);
        v.station = layout_.index_of(s.id);
        v.purpose = Purpose::to_station;
        v.route_valid = false;
      }
      target = layout_.stations[*v.station].node;
      if (v.node == target) {
        park(v);
        return;
      }
    }

    if (!v.route_valid || v.route_target != target ||
        v.route_pos >= v.route.size()) {
      v.route = router_.fastest_path(v.node, target).segments;
      v.route_pos = 0;
      v.route_target = target;
      v.route_valid = true;
    }
    const auto seg_idx = network_.segment_index(v.route[v.route_pos++]);
    const auto& seg = network_.segments()[seg_idx];
    v.status = Status::moving;
    v.segment = seg_idx;
    v.segment_enter = now;
    v.segment_exit = now + seg.traversal_time();
    v.segment_occupancy = static_cast<int>(v.onboard.size());
    schedule(v.segment_exit, EventKind::vehicle, v.id);
    return;
  }
}

void Simulation::on_vehicle(VehicleId id, double now) {
  auto& v = vehicles_.at(static_cast<std::size_t>(id));
  if (v.status == Status::moving) {
    const auto& seg = network_.segments()[v.segment];
    trace_.traversals.push_back(
        {v.id, seg.id, v.segment_enter, v.segment_exit, v.segment_occupancy});
    v.node = seg.to;
  } else if (v.status == Status::dwelling) {
    finish_order(v, *v.in_service, now);
    v.in_service.reset();
  } else {
    throw std::logic_error(
        fmt::format("vehicle {} woke up while not active", v.id));
  }
  step(v, now);
}

void Simulation::on_rebalance(double now) {
  audit(now);
  const auto n = layout_.size();
  std::vector<int> idle(n), expected(n);
  for (std::size_t s = 0; s < n; ++s) {
    idle[s] = static_cast<int>(depot_.stock(s));
    expected[s] = idle[s];
  }
  for (const auto& v : vehicles_) {
    if (v.status != Status::parked && v.purpose == Purpose::to_station) {
      ++expected[*v.station];
    }
  }
  int total = 0;
  for (int e : expected) total += e;
  const auto targets = compute_targets(region_weights_, total);
  const auto imbalance = compute_imbalance(idle, expected, targets);
  const auto flows =
      solve_transportation(imbalance.supply, imbalance.demand, station_costs_);
  const auto applied = apply_rebalancing(flows, depot_);
  trace_.rebalancing_shortfall += applied.shortfall;
  for (const auto& f : flows) {
    trace_.rebalancing.push_back({now, layout_.stations[f.from_station].id,
                                  layout_.stations[f.to_station].id,
                                  f.vehicle_count});
  }
  for (const auto& d : applied.dispatches) {
    auto& v = vehicles_.at(static_cast<std::size_t>(d.vehicle));
    v.status = Status::moving;
    v.purpose = Purpose::to_station;
    v.station = d.to_station;
    v.route_valid = false;
    step(v, now);
  }
  audit(now);
}

void Simulation::on_sample(double now) {
  for (const auto& v : vehicles_) {
    if (v.status == Status::moving || v.status == Status::dwelling) {
      trace_.occupancy.push_back(
          {now, v.id, static_cast<int>(v.onboard.size())});
    }
  }
}

void Simulation::audit(double now) {
  ConservationAudit a;
  a.time = now;
  int parked_states = 0;
  for (const auto& v : vehicles_) {
    switch (v.status) {
      case Status::released:
        continue;
      case Status::parked:
        ++parked_states;
        if (!v.station || !depot_.idle(*v.station).contains(v.id)) {
          a.depot_consistent = false;
        }
        break;
      case Status::moving:
      case Status::dwelling:
        if (v.plan.empty() && v.onboard.empty() && !v.in_service) {
          ++a.empty_moving;
        } else {
          ++a.serving;
        }
        break;
    }
    ++a.total;
  }
  a.parked = static_cast<int>(depot_.total_idle());
  if (a.parked != parked_states) a.depot_consistent = false;
  if (config_.mode != Mode::present &&
      static_cast<std::size_t>(a.total) != trace_.fleet_size) {
    a.depot_consistent = false;
  }
  trace_.audits.push_back(a);
}

}  // namespace

SimTrace run_scenario(const ScenarioConfig& config, const RoadNetwork& network,
                      std::span<const TravelRequest> demand,
                      const StationLayout& layout,
                      const TravelTimeEstimator& estimator) {
  Simulation sim(config, network, demand, layout, estimator);
  return sim.run();
}

StationLayout with_stocks(StationLayout layout, std::span<const int> stocks) {
  if (stocks.size() != layout.size()) {
    throw ConfigError(fmt::format("{} stocks given for {} stations",
                                  stocks.size(), layout.size()));
  }
  for (std::size_t s = 0; s < layout.size(); ++s) {
    layout.stations[s].initial_stock = stocks[s];
  }
  return layout;
}

std::vector<int> proportional_stocks(int total_fleet,
                                     const StationLayout& layout,
                                     std::span<const TravelRequest> demand,
                                     const RoadNetwork& network,
                                     const TravelTimeEstimator& estimator) {
  const auto weights = origin_weights(layout, demand, network, estimator);
  return apportion_largest_remainder(total_fleet, weights);
}

}  // namespace modsim
