#include "transport_oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace modsim::testing {

namespace {

struct Search {
  const CostMatrix& costs;
  std::vector<int> row_left;
  std::vector<int> col_left;
  int target = 0;
  double best = std::numeric_limits<double>::infinity();

  void visit(std::size_t cell, int shipped, double cost) {
    if (cell == costs.rows * costs.cols) {
      if (shipped == target) best = std::min(best, cost);
      return;
    }
    const std::size_t i = cell / costs.cols, j = cell % costs.cols;
    const int cap = std::min({row_left[i], col_left[j], target - shipped});
    for (int x = 0; x <= cap; ++x) {
      row_left[i] -= x;
      col_left[j] -= x;
      visit(cell + 1, shipped + x, cost + x * costs.at(i, j));
      row_left[i] += x;
      col_left[j] += x;
    }
  }
};

}  // namespace

double enumerate_min_transport_cost(std::span<const int> supplies,
                                    std::span<const int> demands,
                                    const CostMatrix& costs) {
  Search s{costs, {supplies.begin(), supplies.end()},
           {demands.begin(), demands.end()}, 0};
  s.target = std::min(std::accumulate(supplies.begin(), supplies.end(), 0),
                      std::accumulate(demands.begin(), demands.end(), 0));
  s.visit(0, 0, 0.0);
  return s.best;
}

}  // namespace modsim::testing
