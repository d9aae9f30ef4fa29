#include <fmt/format.h>

#include "modsim/errors.hpp"
#include "modsim/sim_engine.hpp"

namespace modsim {

std::vector<int> size_fleet(const ScenarioConfig& config,
                            const RoadNetwork& network,
                            std::span<const TravelRequest> demand,
                            const StationLayout& layout,
                            const TravelTimeEstimator& estimator) {
  if (layout.empty()) throw ConfigError("fleet sizing needs stations");
  if (demand.empty()) return std::vector<int>(layout.size(), 0);

  ScenarioConfig mod = config;
  mod.mode = Mode::mod;
  auto feasible = [&](int fleet) {
    const auto stocks =
        proportional_stocks(fleet, layout, demand, network, estimator);
    const auto trace = run_scenario(mod, network, demand,
                                    with_stocks(layout, stocks), estimator);
    return trace.unserved == 0;
  };

  // Invariant: `low` is infeasible, `high` is feasible. Zero vehicles
  // cannot serve a non-empty demand.
  int low = 0;
  int high = static_cast<int>(demand.size());
  if (!feasible(high)) {
    throw Error(fmt::format(
        "demand is unserviceable even with a fleet of {} vehicles", high));
  }
  while (high - low > 1) {
    const int mid = low + (high - low) / 2;
    if (feasible(mid)) {
      high = mid;
    } else {
      low = mid;
    }
  }
  return proportional_stocks(high, layout, demand, network, estimator);
}

}  // namespace modsim
