#include "modsim/rebalancing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "modsim/errors.hpp"

namespace modsim {
namespace {

/// Residual network for the bipartite min-cost flow.
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t nodes) : adjacency_(nodes) {}

  std::size_t add_edge(std::size_t from, std::size_t to, long long capacity,
                       double cost) {
    const auto id = edges_.size();
    edges_.push_back({to, capacity, cost});
    adjacency_[from].push_back(id);
    edges_.push_back({from, 0, -cost});
    adjacency_[to].push_back(id + 1);
    return id;
  }

  /// Pushes up to `limit` units from source to sink along cheapest residual
  /// paths. Returns the amount shipped.
  long long min_cost_flow(std::size_t source, std::size_t sink,
                          long long limit) {
    long long shipped = 0;
    const auto n = adjacency_.size();
    std::vector<double> dist(n);
    std::vector<std::size_t> via(n);
    std::vector<std::uint8_t> queued(n);
    while (shipped < limit) {
      // Bellman-Ford (queue based); residual costs may be negative.
      constexpr double kInf = std::numeric_limits<double>::infinity();
      constexpr auto kNone = std::numeric_limits<std::size_t>::max();
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(via.begin(), via.end(), kNone);
      std::fill(queued.begin(), queued.end(), 0);
      std::vector<std::size_t> queue{source};
      dist[source] = 0.0;
      queued[source] = 1;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto v = queue[head];
        queued[v] = 0;
        for (auto e : adjacency_[v]) {
          const auto& edge = edges_[e];
          if (edge.capacity <= 0) continue;
          const double cand = dist[v] + edge.cost;
          if (cand < dist[edge.to] - 1e-12 * std::max(1.0, std::abs(cand))) {
            dist[edge.to] = cand;
            via[edge.to] = e;
            if (!queued[edge.to]) {
              queued[edge.to] = 1;
              queue.push_back(edge.to);
            }
          }
        }
      }
      if (via[sink] == kNone) break;
      long long bottleneck = limit - shipped;
      for (auto v = sink; v != source;) {
        const auto e = via[v];
        bottleneck = std::min(bottleneck, edges_[e].capacity);
        v = edges_[e ^ 1].to;
      }
      for (auto v = sink; v != source;) {
        const auto e = via[v];
        edges_[e].capacity -= bottleneck;
        edges_[e ^ 1].capacity += bottleneck;
        v = edges_[e ^ 1].to;
      }
      shipped += bottleneck;
    }
    return shipped;
  }

  long long flow_on(std::size_t edge_id) const {
    return edges_[edge_id ^ 1].capacity;
  }

 private:
  struct Edge {
    std::size_t to;
    long long capacity;
    double cost;
  };
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

}  // namespace

std::vector<int> compute_targets(std::span<const double> weights, int total) {
  return apportion_largest_remainder(total, weights);
}

StockImbalance compute_imbalance(std::span<const int> idle,
                                 std::span<const int> expected,
                                 std::span<const int> targets) {
  if (idle.size() != targets.size() || expected.size() != targets.size()) {
    throw Error("stock vectors differ in length");
  }
  StockImbalance out;
  out.supply.resize(targets.size());
  out.demand.resize(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const int surplus = expected[i] - targets[i];
    out.supply[i] = std::min(idle[i], std::max(0, surplus));
    out.demand[i] = std::max(0, -surplus);
  }
  return out;
}

std::vector<RebalancingFlow> solve_transportation(std::span<const int> supplies,
                                                  std::span<const int> demands,
                                                  const CostMatrix& costs) {
  if (costs.rows != supplies.size() || costs.cols != demands.size()) {
    throw Error(fmt::format("cost matrix is {}x{}, expected {}x{}", costs.rows,
                            costs.cols, supplies.size(), demands.size()));
  }
  for (double c : costs.values) {
    if (!(c >= 0.0)) throw Error(fmt::format("negative transport cost {}", c));
  }
  for (int s : supplies) {
    if (s < 0) throw Error("negative supply");
  }
  for (int d : demands) {
    if (d < 0) throw Error("negative demand");
  }
  const long long total_supply =
      std::accumulate(supplies.begin(), supplies.end(), 0LL);
  const long long total_demand =
      std::accumulate(demands.begin(), demands.end(), 0LL);
  const long long target = std::min(total_supply, total_demand);
  if (target == 0) return {};

  const auto m = supplies.size();
  const auto n = demands.size();
  const std::size_t source = m + n;
  const std::size_t sink = m + n + 1;
  FlowNetwork net(m + n + 2);
  for (std::size_t i = 0; i < m; ++i) {
    if (supplies[i] > 0) net.add_edge(source, i, supplies[i], 0.0);
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (demands[j] > 0) net.add_edge(m + j, sink, demands[j], 0.0);
  }
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> lanes;
  for (std::size_t i = 0; i < m; ++i) {
    if (supplies[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (demands[j] == 0) continue;
      lanes.emplace_back(i, j, net.add_edge(i, m + j, target, costs.at(i, j)));
    }
  }
  net.min_cost_flow(source, sink, target);

  std::vector<RebalancingFlow> flows;
  for (const auto& [i, j, edge] : lanes) {
    const auto units = net.flow_on(edge);
    if (units > 0) {
      flows.push_back({i, j, static_cast<int>(units), costs.at(i, j)});
    }
  }
  return flows;
}

double total_cost(std::span<const RebalancingFlow> flows) {
  double total = 0.0;
  for (const auto& f : flows) total += f.unit_cost * f.vehicle_count;
  return total;
}

CostMatrix station_cost_matrix(const StationLayout& layout,
                               const RoadNetwork& network,
                               const TravelTimeEstimator& estimator) {
  CostMatrix costs(layout.size(), layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    for (std::size_t j = 0; j < layout.size(); ++j) {
      costs.at(i, j) = i == j ? 0.0
                              : estimator.estimate(
                                    network.position(layout.stations[i].node),
                                    network.position(layout.stations[j].node));
    }
  }
  return costs;
}

AppliedRebalancing apply_rebalancing(std::span<const RebalancingFlow> flows,
                                     StationDepot& depot) {
  AppliedRebalancing out;
  for (const auto& flow : flows) {
    for (int k = 0; k < flow.vehicle_count; ++k) {
      const auto vehicle = depot.take_lowest(flow.from_station);
      if (!vehicle) {
        out.shortfall += flow.vehicle_count - k;
        break;
      }
      out.dispatches.push_back({*vehicle, flow.from_station, flow.to_station});
    }
  }
  return out;
}

}  // namespace modsim
