#pragma once

#include <optional>
#include <stdexcept>

#include "sfcplace/cost.hpp"
#include "sfcplace/state.hpp"

namespace sfcplace {

struct ExactLimits {
  double combination_limit = 1e6;  // refuse instances with more complete assignments
  long long node_budget = 50'000'000;
};

enum class ExactStatus { Optimal, BudgetExhausted, Infeasible };

struct ExactResult {
  ExactStatus status = ExactStatus::Infeasible;
  bool has_solution = false;
  bool proven_optimal = false;
  PlacementState best_state;
  CostBreakdown best_cost;
  long long nodes_explored = 0;
};

// The instance is too large for exhaustive search.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Number of complete (path, node-ordered server sequence) assignments over
// all demands of the instance. Returned as double since it overflows quickly.
double count_assignments(const Scenario& scenario);

// Depth-first branch and bound. Demands by bandwidth (descending), paths by
// delay, servers in path order. Partial edge OPEX plus cloud charges bound
// each subtree; delays and penalties are evaluated only at complete leaves.
// Throws GuardError above limits.combination_limit.
ExactResult solve_exact(const Scenario& scenario, const std::optional<Snapshot>& snapshot = {},
                        const ExactLimits& limits = {});

}  // namespace sfcplace
