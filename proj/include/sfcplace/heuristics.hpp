#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfcplace/rng.hpp"
#include "sfcplace/state.hpp"

namespace sfcplace {

enum class Algorithm { FF, RF, GRD };

std::string to_string(Algorithm alg);
Algorithm parse_algorithm(const std::string& text);  // "ff", "rf", "grd"

// Which SFCs the local search revisits. NewDemands: every SFC without an
// initial placement, or with demands that arrived after it. All: every SFC.
enum class SearchScope { NewDemands, All };

struct HeuristicConfig {
  Algorithm algorithm = Algorithm::GRD;
  std::uint64_t seed = 1;
  int local_search_sweeps = 1;
  SearchScope scope = SearchScope::NewDemands;
  // Route all demands of one SFC over a single path (used for the initial
  // placement, which must not replicate).
  bool single_path_per_sfc = false;
};

// First-Fit / Random-Fit. Demands in SFC order. `initial`, when given, supplies the
// snapshot recorded in the result (it does not steer FF/RF).
PlacementState simple_placement(const Scenario& scenario, Algorithm alg, std::uint64_t seed,
                                bool single_path_per_sfc = false,
                                const PlacementState* initial = nullptr);

// Greedy: initial demands first, then the later ones, then local search.
// `initial` is the earlier placement whose paths and servers are reused.
PlacementState greedy_place(const Scenario& scenario, const HeuristicConfig& config,
                            const PlacementState* initial = nullptr);

// Dispatches on config.algorithm.
PlacementState run_heuristic(const Scenario& scenario, const HeuristicConfig& config,
                             const PlacementState* initial = nullptr);

// Greedy path cascade over `candidates` (already capacity-filtered). Returns
// kNone for an empty list.
PathId choose_path_greedy(const Placement& current, const Placement* initial, int demand,
                          const std::vector<PathId>& candidates);

// Greedy server cascade for chain position `vnf` of `demand` on `path`.
// Servers located before node position `min_position` are dropped first.
// Returns kNone when nothing remains.
ServerId choose_server_greedy(const Placement& current, const Placement* initial, int demand,
                              const Path& path, int vnf, int min_position,
                              const std::vector<ServerId>& candidates);

// Local search: each demand of the scoped SFCs is removed and re-placed by
// Random-Fit; the move is kept only if the objective strictly drops.
// Returns the final objective.
double find_new_incumbent(Placement& placement, const std::vector<int>& sfcs, Rng& rng,
                          int sweeps, bool single_path_per_sfc = false);

}  // namespace sfcplace
