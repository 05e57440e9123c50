#include "sfcplace/heuristics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "sfcplace/cost.hpp"
#include "sfcplace/error.hpp"

namespace sfcplace {

std::string to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::FF: return "ff";
    case Algorithm::RF: return "rf";
    case Algorithm::GRD: return "grd";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "ff") return Algorithm::FF;
  if (text == "rf") return Algorithm::RF;
  if (text == "grd") return Algorithm::GRD;
  throw ParseError("unknown algorithm '" + text + "' (expected ff, rf or grd)");
}

namespace {

// Extra processing load a chain under construction puts on each server.
using Tentative = std::map<ServerId, double>;

bool in_list(const std::vector<int>& xs, int x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

class Engine {
 public:
  Engine(Placement& pl, Rng& rng, Algorithm alg, bool single_path, const Placement* initial)
      : pl_(pl), sc_(pl.scenario()), rng_(rng), alg_(alg), single_path_(single_path),
        initial_(initial) {}

  bool try_place(int demand) {
    std::vector<PathId> cands = feasible_paths(demand);
    while (!cands.empty()) {
      PathId p = kNone;
      switch (alg_) {
        case Algorithm::FF: p = cands.front(); break;
        case Algorithm::RF: p = rng_.pick(cands); break;
        case Algorithm::GRD: p = choose_path_greedy(pl_, initial_, demand, cands); break;
      }
      if (auto chain = choose_chain(demand, p)) {
        if (commit(demand, p, std::move(*chain))) return true;
      }
      cands.erase(std::find(cands.begin(), cands.end(), p));
    }
    return false;
  }

  void place(int demand) {
    if (try_place(demand)) return;
    if (single_path_ && reroute_sfc(demand)) return;
    throw InfeasibleDemand(demand, diagnose(demand));
  }

 private:
  struct Slot {
    ServerId server;
    int position;  // node position on the path
  };

  std::vector<Slot> slots(const Path& path) const {
    std::vector<Slot> out;
    for (ServerId x : path.servers) {
      out.push_back({x, path.node_position(sc_.net().server(x).node)});
    }
    return out;
  }

  bool new_path(int sfc, PathId p) const { return pl_.occupancy().path_use(sfc).count(p) == 0; }

  std::vector<PathId> allowed_paths(int demand) const {
    const int s = sc_.demands[demand].sfc;
    const auto& admissible = sc_.sfcs[s].admissible_paths;
    if (single_path_ && pl_.occupancy().active_paths(s) > 0) {
      std::vector<PathId> out;
      for (PathId p : admissible) {
        if (!new_path(s, p)) out.push_back(p);
      }
      return out;
    }
    return admissible;
  }

  double link_residual(PathId p) const {
    double r = std::numeric_limits<double>::infinity();
    for (LinkId l : sc_.net().path(p).links) {
      const Link& link = sc_.net().link(l);
      if (!link.unlimited()) r = std::min(r, link.capacity_max - pl_.occupancy().link_load(l));
    }
    return r;
  }

  std::vector<PathId> feasible_paths(int demand) const {
    const double bw = sc_.demands[demand].bandwidth;
    const int s = sc_.demands[demand].sfc;
    std::vector<PathId> out;
    for (PathId p : allowed_paths(demand)) {
      if (link_residual(p) < bw) continue;
      Tentative t;
      if (chain_fits(sc_.net().path(p), s, 0, 0, bw, t, new_path(s, p))) out.push_back(p);
    }
    return out;
  }

  // Server x can take position v of a demand of `bw` on top of `t`.
  bool available(ServerId x, int s, int v, double bw, const Tentative& t, bool fresh_path) const {
    const Occupancy& occ = pl_.occupancy();
    const VnfType& type = sc_.vnf(s, v);
    const bool exists = occ.hosts(s, v, x);
    if (!exists) {
      const int limit = type.replicable ? occ.active_paths(s) + (fresh_path ? 1 : 0) : 1;
      if (occ.instance_count(s, v) + 1 > limit) return false;
    }
    const auto it = t.find(x);
    const double pending = it == t.end() ? 0.0 : it->second;
    const double add = type.load_ratio * bw + (exists ? 0.0 : type.overhead);
    return occ.server_load(x) + pending + add <= sc_.net().server(x).capacity_max;
  }

  double added_load(ServerId x, int s, int v, double bw) const {
    const VnfType& type = sc_.vnf(s, v);
    return type.load_ratio * bw + (pl_.occupancy().hosts(s, v, x) ? 0.0 : type.overhead);
  }

  // Earliest-fit packing of positions v..end from node position `pos`.
  bool chain_fits(const Path& path, int s, int v, int pos, double bw, Tentative t,
                  bool fresh_path) const {
    const auto sl = slots(path);
    for (; v < sc_.sfcs[s].length(); ++v) {
      bool found = false;
      for (const Slot& slot : sl) {
        if (slot.position < pos || !available(slot.server, s, v, bw, t, fresh_path)) continue;
        t[slot.server] += added_load(slot.server, s, v, bw);
        pos = slot.position;
        found = true;
        break;
      }
      if (!found) return false;
    }
    return true;
  }

  // bw_override sizes the chain for traffic other than the demand's own.
  std::optional<std::vector<ServerId>> choose_chain(int demand, PathId p, double bw_override = 0.0) {
    const Path& path = sc_.net().path(p);
    const int s = sc_.demands[demand].sfc;
    const double bw = bw_override > 0.0 ? bw_override : sc_.demands[demand].bandwidth;
    const bool fresh = new_path(s, p);
    const auto sl = slots(path);
    Tentative t;
    int pos = 0;
    std::vector<ServerId> chain;
    for (int v = 0; v < sc_.sfcs[s].length(); ++v) {
      std::vector<ServerId> cands;
      std::vector<int> cand_pos;
      for (const Slot& slot : sl) {
        if (slot.position < pos || !available(slot.server, s, v, bw, t, fresh)) continue;
        Tentative next = t;
        next[slot.server] += added_load(slot.server, s, v, bw);
        if (!chain_fits(path, s, v + 1, slot.position, bw, next, fresh)) continue;
        cands.push_back(slot.server);
        cand_pos.push_back(slot.position);
      }
      if (cands.empty()) return std::nullopt;
      ServerId x = kNone;
      switch (alg_) {
        case Algorithm::FF: x = cands.front(); break;
        case Algorithm::RF: x = rng_.pick(cands); break;
        case Algorithm::GRD: x = choose_server_greedy(pl_, initial_, demand, path, v, pos, cands); break;
      }
      const auto idx = std::find(cands.begin(), cands.end(), x) - cands.begin();
      t[x] += added_load(x, s, v, bw);
      pos = cand_pos[idx];
      chain.push_back(x);
    }
    return chain;
  }

  bool links_ok() const {
    for (const Link& l : sc_.net().links()) {
      if (!l.unlimited() && pl_.occupancy().link_load(l.id) > l.capacity_max) return false;
    }
    return true;
  }

  bool replication_ok(int s) const {
    const Occupancy& occ = pl_.occupancy();
    for (int v = 0; v < sc_.sfcs[s].length(); ++v) {
      const int limit = sc_.vnf(s, v).replicable ? occ.active_paths(s) : 1;
      if (occ.instance_count(s, v) > limit) return false;
    }
    return true;
  }

  // The pending-load arithmetic in available() may round differently from
  // the occupancy totals, so the committed loads are checked again.
  bool servers_ok(const std::vector<ServerId>& chain) const {
    for (ServerId x : chain) {
      if (pl_.occupancy().server_load(x) > sc_.net().server(x).capacity_max) return false;
    }
    return true;
  }

  bool commit(int demand, PathId p, std::vector<ServerId> chain) {
    const int s = sc_.demands[demand].sfc;
    const auto saved_sync = pl_.sync_of(s);
    const std::vector<ServerId> used = chain;
    pl_.place_demand(demand, p, std::move(chain));
    bool ok = servers_ok(used) && replication_ok(s);
    if (ok) {
      try {
        pl_.assign_sync(s);
        ok = links_ok();
      } catch (const UnreachableError&) {
        ok = false;
      }
    }
    if (!ok) {
      pl_.remove_demand(demand);
      pl_.restore_sync(s, saved_sync);
    }
    return ok;
  }

  // Single-path mode: the SFC's path is fixed by its first demand and its
  // instances cannot be replicated. When a later demand does not fit, all
  // demands of the SFC move to one chain sized for their total bandwidth on
  // the first other path that takes it.
  bool reroute_sfc(int demand) {
    const int s = sc_.demands[demand].sfc;
    std::vector<int> moved;
    for (int d : sc_.sfcs[s].demands) {
      if (d != demand && pl_.routed(d)) moved.push_back(d);
    }
    if (moved.empty()) return false;
    const PathId old_path = pl_.state().route[moved.front()];
    std::vector<std::vector<ServerId>> old_servers;
    for (int d : moved) old_servers.push_back(pl_.state().servers[d]);
    const auto old_sync = pl_.sync_of(s);
    for (int d : moved) pl_.remove_demand(d);
    pl_.clear_sync(s);
    moved.push_back(demand);
    double total = 0.0;
    for (int d : moved) total += sc_.demands[d].bandwidth;
    for (PathId p : sc_.sfcs[s].admissible_paths) {
      if (p == old_path || link_residual(p) < total) continue;
      auto chain = choose_chain(demand, p, total);
      if (!chain) continue;
      for (int d : moved) pl_.place_demand(d, p, *chain);
      bool ok = servers_ok(*chain) && replication_ok(s) && links_ok();
      if (ok) return true;
      for (int d : moved) pl_.remove_demand(d);
    }
    moved.pop_back();
    for (std::size_t i = 0; i < moved.size(); ++i) pl_.place_demand(moved[i], old_path, old_servers[i]);
    pl_.restore_sync(s, old_sync);
    return false;
  }

  std::string diagnose(int demand) const {
    std::ostringstream os;
    const double bw = sc_.demands[demand].bandwidth;
    const int s = sc_.demands[demand].sfc;
    os << "SFC " << s << ", bandwidth " << bw << ";";
    for (PathId p : allowed_paths(demand)) {
      const Path& path = sc_.net().path(p);
      double best_server = 0.0;
      for (ServerId x : path.servers) {
        best_server = std::max(best_server, sc_.net().server(x).capacity_max -
                                                pl_.occupancy().server_load(x));
      }
      os << " path " << p << ": link residual " << link_residual(p)
         << ", largest server residual " << best_server << ";";
    }
    return os.str();
  }

  Placement& pl_;
  const Scenario& sc_;
  Rng& rng_;
  Algorithm alg_;
  bool single_path_;
  const Placement* initial_;
};

std::vector<int> search_scope(const Scenario& sc, const PlacementState* initial, SearchScope scope) {
  std::vector<int> out;
  for (const Sfc& s : sc.sfcs) {
    bool include = scope == SearchScope::All || initial == nullptr;
    for (int d : s.demands) {
      if (!sc.demands[d].in_initial_set) include = true;
    }
    if (include && !s.demands.empty()) out.push_back(s.id);
  }
  return out;
}

}  // namespace

PathId choose_path_greedy(const Placement& current, const Placement* initial, int demand,
                          const std::vector<PathId>& candidates) {
  if (candidates.empty()) return kNone;
  const int s = current.scenario().demands[demand].sfc;
  if (initial) {
    const PathId own = initial->state().route[demand];
    if (own != kNone && in_list(candidates, own)) return own;
    for (PathId p : candidates) {
      if (initial->occupancy().path_use(s).count(p)) return p;
    }
  }
  for (PathId p : candidates) {
    if (current.occupancy().path_use(s).count(p)) return p;
  }
  const NetworkModel& net = current.scenario().net();
  PathId best = candidates.front();
  for (PathId p : candidates) {
    if (net.path(p).total_prop_delay < net.path(best).total_prop_delay) best = p;
  }
  return best;
}

ServerId choose_server_greedy(const Placement& current, const Placement* initial, int demand,
                              const Path& path, int vnf, int min_position,
                              const std::vector<ServerId>& candidates) {
  const NetworkModel& net = current.scenario().net();
  std::vector<ServerId> xs;
  for (ServerId x : candidates) {
    if (path.node_position(net.server(x).node) >= min_position) xs.push_back(x);
  }
  if (xs.empty()) return kNone;
  const int s = current.scenario().demands[demand].sfc;
  auto index_of = [&](ServerId x) {
    return static_cast<long>(std::find(xs.begin(), xs.end(), x) - xs.begin());
  };
  // Index of the first cloud server; without one the reuse tests always pass.
  long cloud = std::numeric_limits<long>::max();
  for (ServerId x : xs) {
    if (net.server(x).is_cloud) {
      cloud = index_of(x);
      break;
    }
  }
  if (initial) {
    const auto& own = initial->state().servers[demand];
    if (vnf < static_cast<int>(own.size()) && in_list(xs, own[vnf])) return own[vnf];
    for (ServerId x : xs) {
      if (initial->occupancy().hosts(s, vnf, x)) {
        if (index_of(x) < cloud) return x;
        break;
      }
    }
  }
  for (ServerId x : xs) {
    if (current.occupancy().hosts(s, vnf, x)) {
      if (index_of(x) < cloud) return x;
      break;
    }
  }
  return xs.front();
}

double find_new_incumbent(Placement& pl, const std::vector<int>& sfcs, Rng& rng, int sweeps,
                          bool single_path_per_sfc) {
  double b = total_cost(pl).total;
  Engine engine(pl, rng, Algorithm::RF, single_path_per_sfc, nullptr);
  const int rounds = sweeps * static_cast<int>(sfcs.size());
  for (int round = 0; round < rounds; ++round) {
    for (int s : sfcs) {
      for (int d : pl.scenario().sfcs[s].demands) {
        if (!pl.routed(d)) continue;
        const PathId old_path = pl.state().route[d];
        const std::vector<ServerId> old_servers = pl.state().servers[d];
        const auto old_sync = pl.sync_of(s);
        pl.remove_demand(d);
        bool improved = false;
        if (engine.try_place(d)) {
          const double b2 = total_cost(pl).total;
          if (b2 < b) {
            b = b2;
            improved = true;
          } else {
            pl.remove_demand(d);
          }
        }
        if (!improved) {
          pl.place_demand(d, old_path, old_servers);
          pl.restore_sync(s, old_sync);
        }
      }
      const auto before = pl.sync_of(s);
      pl.assign_sync(s);
      bool ok = true;
      for (const Link& l : pl.scenario().net().links()) {
        if (!l.unlimited() && pl.occupancy().link_load(l.id) > l.capacity_max) ok = false;
      }
      if (!ok) pl.restore_sync(s, before);
    }
  }
  return b;
}

PlacementState simple_placement(const Scenario& scenario, Algorithm alg, std::uint64_t seed,
                                bool single_path_per_sfc, const PlacementState* initial) {
  Placement pl(scenario);
  if (initial) pl.set_snapshot(take_snapshot(Placement(scenario, *initial)));
  Rng rng = Rng::stream(seed, "placement");
  Engine engine(pl, rng, alg, single_path_per_sfc, nullptr);
  for (const Sfc& s : scenario.sfcs) {
    for (int d : s.demands) engine.place(d);
  }
  return pl.state();
}

PlacementState greedy_place(const Scenario& scenario, const HeuristicConfig& config,
                            const PlacementState* initial) {
  std::optional<Placement> init;
  if (initial) init.emplace(scenario, *initial);
  Placement pl(scenario);
  if (init) pl.set_snapshot(take_snapshot(*init));
  Rng rng = Rng::stream(config.seed, "placement");
  Engine engine(pl, rng, Algorithm::GRD, config.single_path_per_sfc, init ? &*init : nullptr);
  for (const Sfc& s : scenario.sfcs) {
    for (int d : s.demands) {
      if (scenario.demands[d].in_initial_set) engine.place(d);
    }
  }
  for (const Sfc& s : scenario.sfcs) {
    for (int d : s.demands) {
      if (!scenario.demands[d].in_initial_set) engine.place(d);
    }
    pl.assign_sync(s.id);
  }
  Rng search_rng = Rng::stream(config.seed, "local-search");
  find_new_incumbent(pl, search_scope(scenario, initial, config.scope), search_rng,
                     config.local_search_sweeps, config.single_path_per_sfc);
  return pl.state();
}

PlacementState run_heuristic(const Scenario& scenario, const HeuristicConfig& config,
                             const PlacementState* initial) {
  if (config.local_search_sweeps < 0) throw ModelError("local search sweeps must be >= 0");
  if (config.algorithm == Algorithm::GRD) return greedy_place(scenario, config, initial);
  return simple_placement(scenario, config.algorithm, config.seed, config.single_path_per_sfc,
                          initial);
}

}  // namespace sfcplace
