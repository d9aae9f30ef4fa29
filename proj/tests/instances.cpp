#include "instances.hpp"

#include <algorithm>
#include <random>

#include "modsim/grid.hpp"

namespace modsim::testing {
namespace {

std::shared_ptr<const RoadNetwork> shared_grid() {
  static const auto net = std::make_shared<const RoadNetwork>(
      make_grid_network({7, 7, 200.0, 40.0, 3, 70.0}));
  return net;
}

const TravelTimeEstimator& shared_estimator() {
  static const auto est = calibrate_estimator(*shared_grid(), 400, 12);
  return est;
}

}  // namespace

std::size_t MatchInstance::total_orders() const {
  std::size_t n = 0;
  for (const auto& v : fleet) n += v.plan.size();
  return n;
}

MatchInstance random_instance(std::uint64_t seed, InstanceLimits limits) {
  std::mt19937_64 rng(seed);
  const auto net = shared_grid();
  const auto node_count = net->node_count();
  std::uniform_int_distribution<std::size_t> any_node(0, node_count - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Router router(*net);

  for (;;) {
    MatchInstance inst;
    inst.network = net;
    inst.estimator = shared_estimator();
    inst.now = 1000.0;
    inst.q_max = 150.0 + 750.0 * unit(rng);
    inst.service_time = unit(rng) < 0.3 ? 15.0 : 0.0;
    RequestId next_request = 0;

    auto new_request = [&](double announced) {
      ServiceRequest r;
      r.id = next_request++;
      r.announcement_time = announced;
      do {
        r.origin = net->nodes()[any_node(rng)].id;
        r.destination = net->nodes()[any_node(rng)].id;
      } while (r.origin == r.destination);
      r.baseline = router.fastest_duration(r.origin, r.destination);
      inst.book.add(r);
      return r;
    };

    const auto vehicles =
        1 + std::uniform_int_distribution<std::size_t>(0, limits.max_vehicles - 1)(rng);
    std::vector<VehicleId> ids(vehicles);
    for (std::size_t k = 0; k < vehicles; ++k) ids[k] = static_cast<VehicleId>(10 * k + 3);
    std::shuffle(ids.begin(), ids.end(), rng);  // fleet order != id order

    for (std::size_t k = 0; k < vehicles; ++k) {
      VehicleState v;
      v.id = ids[k];
      v.anchor = net->nodes()[any_node(rng)].id;
      if (unit(rng) < 0.5) {
        v.anchor_delay = 20.0 * unit(rng);
        v.anchor_distance = 150.0 * unit(rng);
      }
      if (unit(rng) < 0.3) v.capacity = 1 + static_cast<int>(3 * unit(rng));

      const auto budget = std::uniform_int_distribution<std::size_t>(
          0, limits.max_orders_per_vehicle)(rng);
      std::vector<PlanOrder> orders;
      while (orders.size() < budget) {
        const bool onboard = unit(rng) < 0.5 || orders.size() + 2 > budget;
        const auto r = new_request(inst.now - 600.0 * unit(rng));
        if (onboard) {
          if (v.capacity && v.onboard.size() >= static_cast<std::size_t>(*v.capacity)) {
            break;
          }
          v.onboard.push_back(r.id);
          const auto at = std::uniform_int_distribution<std::size_t>(0, orders.size())(rng);
          orders.insert(orders.begin() + static_cast<std::ptrdiff_t>(at),
                        {OrderKind::dropoff, r.id, r.destination});
        } else {
          const auto p = std::uniform_int_distribution<std::size_t>(0, orders.size())(rng);
          orders.insert(orders.begin() + static_cast<std::ptrdiff_t>(p),
                        {OrderKind::pickup, r.id, r.origin});
          const auto q =
              std::uniform_int_distribution<std::size_t>(p + 1, orders.size())(rng);
          orders.insert(orders.begin() + static_cast<std::ptrdiff_t>(q),
                        {OrderKind::dropoff, r.id, r.destination});
        }
      }
      v.plan.orders = std::move(orders);
      // Capacity might be exceeded by the random pickups; drop it then.
      if (!is_valid_plan(v, v.plan, &inst.book)) v.capacity.reset();
      inst.fleet.push_back(std::move(v));
    }
    if (inst.total_orders() > limits.max_total_orders) continue;
    inst.fresh = new_request(inst.now).id;
    return inst;
  }
}

}  // namespace modsim::testing
