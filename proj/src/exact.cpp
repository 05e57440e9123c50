#include "sfcplace/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfcplace/error.hpp"

namespace sfcplace {

namespace {

std::vector<int> server_positions(const NetworkModel& net, const Path& path) {
  std::vector<int> pos;
  for (ServerId x : path.servers) pos.push_back(path.node_position(net.server(x).node));
  return pos;
}

// Node-monotone server sequences of length `len` on a path.
double sequences_on_path(const NetworkModel& net, const Path& path, int len) {
  const auto pos = server_positions(net, path);
  std::vector<double> ways(pos.size(), 1.0);
  for (int v = 1; v < len; ++v) {
    std::vector<double> next(pos.size(), 0.0);
    for (std::size_t a = 0; a < pos.size(); ++a) {
      for (std::size_t b = 0; b < pos.size(); ++b) {
        if (pos[b] <= pos[a]) next[a] += ways[b];
      }
    }
    ways = std::move(next);
  }
  double total = 0.0;
  for (double w : ways) total += w;
  return total;
}

class Search {
 public:
  Search(const Scenario& sc, const std::optional<Snapshot>& snapshot, const ExactLimits& limits)
      : sc_(sc), pl_(sc), limits_(limits), remaining_(sc.sfcs.size(), 0) {
    pl_.set_snapshot(snapshot);
    for (const Sfc& s : sc.sfcs) {
      for (int d : s.demands) {
        order_.push_back(d);
        ++remaining_[s.id];
      }
    }
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return sc.demands[a].bandwidth > sc.demands[b].bandwidth;
    });
  }

  ExactResult run() {
    dfs(0);
    result_.has_solution = found_;
    if (aborted_) {
      result_.status = ExactStatus::BudgetExhausted;
    } else {
      result_.status = found_ ? ExactStatus::Optimal : ExactStatus::Infeasible;
    }
    result_.proven_optimal = found_ && !aborted_;
    result_.nodes_explored = nodes_;
    return result_;
  }

 private:
  void dfs(std::size_t i) {
    if (aborted_) return;
    if (i == order_.size()) {
      leaf();
      return;
    }
    const int d = order_[i];
    const Sfc& s = sc_.sfcs[sc_.demands[d].sfc];
    std::vector<PathId> paths = s.admissible_paths;
    std::stable_sort(paths.begin(), paths.end(), [&](PathId a, PathId b) {
      return sc_.net().path(a).total_prop_delay < sc_.net().path(b).total_prop_delay;
    });
    for (PathId p : paths) {
      const Path& path = sc_.net().path(p);
      std::vector<ServerId> chain;
      extend(i, d, path, server_positions(sc_.net(), path), 0, chain);
      if (aborted_) return;
    }
  }

  void extend(std::size_t i, int d, const Path& path, const std::vector<int>& pos,
              int min_pos, std::vector<ServerId>& chain) {
    const Sfc& s = sc_.sfcs[sc_.demands[d].sfc];
    if (static_cast<int>(chain.size()) == s.length()) {
      descend(i, d, path, chain);
      return;
    }
    for (std::size_t k = 0; k < path.servers.size() && !aborted_; ++k) {
      if (pos[k] < min_pos) continue;
      chain.push_back(path.servers[k]);
      extend(i, d, path, pos, pos[k], chain);
      chain.pop_back();
    }
  }

  void descend(std::size_t i, int d, const Path& path, const std::vector<ServerId>& chain) {
    if (++nodes_ > limits_.node_budget) {
      aborted_ = true;
      return;
    }
    const int s = sc_.demands[d].sfc;
    pl_.place_demand(d, path.id, chain);
    --remaining_[s];
    if (!pruned(s, path, chain)) dfs(i + 1);
    ++remaining_[s];
    pl_.remove_demand(d);
  }

  bool pruned(int s, const Path& path, const std::vector<ServerId>& chain) const {
    const Occupancy& occ = pl_.occupancy();
    const NetworkModel& net = sc_.net();
    for (ServerId x : chain) {
      if (occ.server_load(x) > net.server(x).capacity_max) return true;
    }
    for (LinkId l : path.links) {
      const Link& link = net.link(l);
      if (!link.unlimited() && occ.link_load(l) > link.capacity_max) return true;
    }
    // Each demand still to come can open at most one more path.
    for (int v = 0; v < sc_.sfcs[s].length(); ++v) {
      const int limit =
          sc_.vnf(s, v).replicable ? occ.active_paths(s) + remaining_[s] : 1;
      if (occ.instance_count(s, v) > limit) return true;
    }
    if (found_) {
      const double bound = edge_opex(pl_) + cloud_charges(pl_);
      if (bound > best_ + 1e-9 * (1.0 + std::abs(best_))) return true;
    }
    return false;
  }

  void leaf() {
    bool ok = true;
    try {
      pl_.assign_all_sync();
    } catch (const UnreachableError&) {
      ok = false;
    }
    if (ok && validate_all(pl_.state(), sc_).empty()) {
      const CostBreakdown c = total_cost(pl_);
      if (!found_ || c.total < best_) {
        found_ = true;
        best_ = c.total;
        result_.best_state = pl_.state();
        result_.best_cost = c;
      }
    }
    for (const Sfc& s : sc_.sfcs) pl_.clear_sync(s.id);
  }

  const Scenario& sc_;
  Placement pl_;
  ExactLimits limits_;
  std::vector<int> order_;
  std::vector<int> remaining_;
  ExactResult result_;
  bool found_ = false;
  bool aborted_ = false;
  double best_ = std::numeric_limits<double>::infinity();
  long long nodes_ = 0;
};

}  // namespace

double count_assignments(const Scenario& scenario) {
  double total = 1.0;
  for (const Sfc& s : scenario.sfcs) {
    if (s.demands.empty()) continue;
    double per_demand = 0.0;
    for (PathId p : s.admissible_paths) {
      per_demand += sequences_on_path(scenario.net(), scenario.net().path(p), s.length());
    }
    total *= std::pow(per_demand, static_cast<double>(s.demands.size()));
  }
  return total;
}

ExactResult solve_exact(const Scenario& scenario, const std::optional<Snapshot>& snapshot,
                        const ExactLimits& limits) {
  const double combos = count_assignments(scenario);
  if (combos > limits.combination_limit) {
    throw GuardError("instance has " + std::to_string(combos) +
                     " complete assignments, above the exact-search limit of " +
                     std::to_string(limits.combination_limit) +
                     "; use fewer demands, shorter chains or a smaller topology");
  }
  return Search(scenario, snapshot, limits).run();
}

}  // namespace sfcplace
