#include "sfcplace/state.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"
#include "sfcplace/error.hpp"

namespace sfcplace {

using nlohmann::json;

namespace {

bool valid_path(const Scenario& sc, PathId p) {
  return p >= 0 && p < static_cast<int>(sc.net().catalog().paths.size());
}

bool valid_server(const Scenario& sc, ServerId x) {
  return x >= 0 && x < static_cast<int>(sc.net().servers().size());
}

double sync_amount(const Scenario& sc, int sfc, int vnf) {
  return sc.vnf(sfc, vnf).sync_ratio * static_cast<double>(sc.sfcs[sfc].demands.size());
}

// Ordered node pairs (n != m) that both host an instance of (sfc, vnf).
std::vector<std::pair<NodeId, NodeId>> sync_pairs(const Occupancy& occ, const Scenario& sc,
                                                  int sfc, int vnf) {
  std::set<NodeId> nodes;
  for (const auto& [x, use] : occ.instances(sfc, vnf)) nodes.insert(sc.net().server(x).node);
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId n : nodes) {
    for (NodeId m : nodes) {
      if (n != m) out.emplace_back(n, m);
    }
  }
  return out;
}

Occupancy build_occupancy(const PlacementState& state, const Scenario& sc) {
  Occupancy occ(sc);
  const int n = static_cast<int>(std::min(state.route.size(), sc.demands.size()));
  for (int d = 0; d < n; ++d) {
    if (state.route[d] == kNone && (d >= static_cast<int>(state.servers.size()) || state.servers[d].empty())) {
      continue;
    }
    static const std::vector<ServerId> kNoServers;
    occ.add_demand(d, state.route[d], d < static_cast<int>(state.servers.size()) ? state.servers[d] : kNoServers);
  }
  occ.set_sync(state.sync);
  return occ;
}

// Demand ids listed by the instance's SFCs.
std::vector<bool> active_demands(const Scenario& sc) {
  std::vector<bool> active(sc.demands.size(), false);
  for (const Sfc& s : sc.sfcs) {
    for (int d : s.demands) active[d] = true;
  }
  return active;
}

PathId route_of(const PlacementState& state, int d) {
  return d < static_cast<int>(state.route.size()) ? state.route[d] : kNone;
}

const std::vector<ServerId>& servers_of(const PlacementState& state, int d) {
  static const std::vector<ServerId> kEmpty;
  return d < static_cast<int>(state.servers.size()) ? state.servers[d] : kEmpty;
}

}  // namespace

PlacementState PlacementState::empty(const Scenario& scenario) {
  PlacementState st;
  st.route.assign(scenario.demands.size(), kNone);
  st.servers.assign(scenario.demands.size(), {});
  return st;
}

// ---------------------------------------------------------------------------
// Occupancy

Occupancy::Occupancy(const Scenario& scenario) : sc_(&scenario) {
  const auto& net = scenario.net();
  server_load_.assign(net.servers().size(), 0.0);
  hosted_.assign(net.servers().size(), {});
  link_demand_.assign(net.links().size(), 0.0);
  link_sync_.assign(net.links().size(), 0.0);
  instances_.resize(scenario.sfcs.size());
  for (const Sfc& s : scenario.sfcs) instances_[s.id].resize(s.vnf_chain.size());
  path_use_.assign(scenario.sfcs.size(), {});
}

void Occupancy::recompute_server(ServerId x) {
  // Summed in (sfc, vnf) order so incremental and from-scratch builds agree.
  double load = 0.0;
  for (const auto& [key, use] : hosted_[x]) {
    const VnfType& t = sc_->vnf(key.first, key.second);
    load += t.load_ratio * use.traffic + t.overhead;
  }
  server_load_[x] = load;
}

void Occupancy::add_demand(int demand, PathId path, const std::vector<ServerId>& servers) {
  const Scenario& sc = *sc_;
  const TrafficDemand& td = sc.demands[demand];
  const int s = td.sfc;
  if (valid_path(sc, path)) {
    for (LinkId l : sc.net().path(path).links) link_demand_[l] += td.bandwidth;
    ++path_use_[s][path];
  }
  const int len = std::min(static_cast<int>(servers.size()), sc.sfcs[s].length());
  for (int v = 0; v < len; ++v) {
    const ServerId x = servers[v];
    if (!valid_server(sc, x)) continue;
    InstanceUse& a = instances_[s][v][x];
    ++a.demands;
    a.traffic += td.bandwidth;
    hosted_[x][{s, v}] = a;
    recompute_server(x);
  }
}

void Occupancy::remove_demand(int demand, PathId path, const std::vector<ServerId>& servers) {
  const Scenario& sc = *sc_;
  const TrafficDemand& td = sc.demands[demand];
  const int s = td.sfc;
  if (valid_path(sc, path)) {
    for (LinkId l : sc.net().path(path).links) link_demand_[l] -= td.bandwidth;
    auto it = path_use_[s].find(path);
    if (it != path_use_[s].end() && --it->second == 0) path_use_[s].erase(it);
  }
  const int len = std::min(static_cast<int>(servers.size()), sc.sfcs[s].length());
  for (int v = 0; v < len; ++v) {
    const ServerId x = servers[v];
    if (!valid_server(sc, x)) continue;
    auto it = instances_[s][v].find(x);
    if (it == instances_[s][v].end()) continue;
    InstanceUse& a = it->second;
    if (--a.demands == 0) {
      instances_[s][v].erase(it);
      hosted_[x].erase({s, v});
    } else {
      a.traffic -= td.bandwidth;
      hosted_[x][{s, v}] = a;
    }
    recompute_server(x);
  }
}

void Occupancy::set_sync(const std::map<SyncKey, PathId>& sync) {
  std::fill(link_sync_.begin(), link_sync_.end(), 0.0);
  for (const auto& [key, p] : sync) {
    if (!valid_path(*sc_, p) || key.sfc < 0 || key.sfc >= static_cast<int>(sc_->sfcs.size()) ||
        key.vnf < 0 || key.vnf >= sc_->sfcs[key.sfc].length()) {
      continue;
    }
    const double amount = sync_amount(*sc_, key.sfc, key.vnf);
    for (LinkId l : sc_->net().path(p).links) link_sync_[l] += amount;
  }
}

double Occupancy::server_util(ServerId x) const {
  return server_load_[x] / sc_->net().server(x).capacity_max;
}

double Occupancy::link_util(LinkId l) const {
  const Link& link = sc_->net().link(l);
  if (link.unlimited()) return 0.0;
  return link_load(l) / link.capacity_max;
}

// ---------------------------------------------------------------------------
// Placement

Placement::Placement(const Scenario& scenario)
    : sc_(&scenario), state_(PlacementState::empty(scenario)), occ_(scenario) {}

Placement::Placement(const Scenario& scenario, PlacementState state)
    : sc_(&scenario), state_(std::move(state)) {
  if (state_.route.size() != scenario.demands.size() ||
      state_.servers.size() != scenario.demands.size()) {
    throw ModelError("placement state does not match the scenario's demand count");
  }
  occ_ = build_occupancy(state_, scenario);
}

void Placement::place_demand(int demand, PathId path, std::vector<ServerId> servers) {
  if (routed(demand)) throw std::logic_error("demand " + std::to_string(demand) + " already placed");
  occ_.add_demand(demand, path, servers);
  state_.route[demand] = path;
  state_.servers[demand] = std::move(servers);
}

void Placement::remove_demand(int demand) {
  if (!routed(demand)) return;
  occ_.remove_demand(demand, state_.route[demand], state_.servers[demand]);
  state_.route[demand] = kNone;
  state_.servers[demand].clear();
}

std::map<SyncKey, PathId> Placement::sync_of(int sfc) const {
  std::map<SyncKey, PathId> out;
  auto it = state_.sync.lower_bound(SyncKey{sfc, kNone, kNone, kNone});
  for (; it != state_.sync.end() && it->first.sfc == sfc; ++it) out.insert(*it);
  return out;
}

void Placement::clear_sync(int sfc) {
  auto it = state_.sync.lower_bound(SyncKey{sfc, kNone, kNone, kNone});
  auto end = it;
  while (end != state_.sync.end() && end->first.sfc == sfc) ++end;
  if (it == end) return;
  state_.sync.erase(it, end);
  occ_.set_sync(state_.sync);
}

void Placement::restore_sync(int sfc, const std::map<SyncKey, PathId>& routes) {
  auto it = state_.sync.lower_bound(SyncKey{sfc, kNone, kNone, kNone});
  auto end = it;
  while (end != state_.sync.end() && end->first.sfc == sfc) ++end;
  state_.sync.erase(it, end);
  state_.sync.insert(routes.begin(), routes.end());
  occ_.set_sync(state_.sync);
}

void Placement::assign_sync(int sfc) {
  clear_sync(sfc);
  const Scenario& sc = *sc_;
  const NetworkModel& net = sc.net();
  std::map<LinkId, double> added;
  bool any = false;
  for (int v = 0; v < sc.sfcs[sfc].length(); ++v) {
    const double amount = sync_amount(sc, sfc, v);
    for (const auto& [n, m] : sync_pairs(occ_, sc, sfc, v)) {
      // Lowest resulting peak utilization along the path, then shortest delay.
      PathId best = kNone;
      double best_peak = 0.0;
      for (PathId p : sync_paths_between(net, n, m)) {
        double peak = 0.0;
        for (LinkId l : net.path(p).links) {
          const Link& link = net.link(l);
          if (link.unlimited()) continue;
          const auto it = added.find(l);
          const double extra = it == added.end() ? 0.0 : it->second;
          peak = std::max(peak, (occ_.link_load(l) + extra + amount) / link.capacity_max);
        }
        if (best == kNone || peak < best_peak ||
            (peak == best_peak && net.path(p).total_prop_delay < net.path(best).total_prop_delay)) {
          best = p;
          best_peak = peak;
        }
      }
      state_.sync[SyncKey{sfc, v, n, m}] = best;
      for (LinkId l : net.path(best).links) added[l] += amount;
      any = true;
    }
  }
  if (any) occ_.set_sync(state_.sync);
}

void Placement::assign_all_sync() {
  for (const Sfc& s : sc_->sfcs) assign_sync(s.id);
}

Snapshot take_snapshot(const Placement& placement) {
  Snapshot snap;
  const Scenario& sc = placement.scenario();
  for (const Sfc& s : sc.sfcs) {
    for (int v = 0; v < s.length(); ++v) {
      for (const auto& [x, use] : placement.occupancy().instances(s.id, v)) {
        snap.insert(InstanceKey{s.id, v, x});
      }
    }
  }
  return snap;
}

// ---------------------------------------------------------------------------
// Utilization

UtilizationReport utilization(const Placement& placement) {
  const Scenario& sc = placement.scenario();
  const Occupancy& occ = placement.occupancy();
  UtilizationReport r;
  for (const Link& l : sc.net().links()) r.link_util.push_back(occ.link_util(l.id));
  for (const Server& x : sc.net().servers()) {
    r.server_load.push_back(occ.server_load(x.id));
    r.server_util.push_back(occ.server_util(x.id));
  }
  return r;
}

UtilizationReport utilization(const PlacementState& state, const Scenario& scenario) {
  const Occupancy occ = build_occupancy(state, scenario);
  UtilizationReport r;
  for (const Link& l : scenario.net().links()) r.link_util.push_back(occ.link_util(l.id));
  for (const Server& x : scenario.net().servers()) {
    r.server_load.push_back(occ.server_load(x.id));
    r.server_util.push_back(occ.server_util(x.id));
  }
  return r;
}

std::vector<double> link_utilization(const PlacementState& state, const Scenario& scenario) {
  return utilization(state, scenario).link_util;
}

// ---------------------------------------------------------------------------
// Validators

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::MissingRoute: return "MissingRoute";
    case ViolationKind::UnexpectedRoute: return "UnexpectedRoute";
    case ViolationKind::InadmissiblePath: return "InadmissiblePath";
    case ViolationKind::MissingVnf: return "MissingVnf";
    case ViolationKind::UnknownServer: return "UnknownServer";
    case ViolationKind::OffPathAssignment: return "OffPathAssignment";
    case ViolationKind::OrderViolation: return "OrderViolation";
    case ViolationKind::ReplicationViolation: return "ReplicationViolation";
    case ViolationKind::LinkCapacity: return "LinkCapacity";
    case ViolationKind::ServerCapacity: return "ServerCapacity";
    case ViolationKind::MissingSyncRoute: return "MissingSyncRoute";
    case ViolationKind::SpuriousSyncRoute: return "SpuriousSyncRoute";
    case ViolationKind::BadSyncPath: return "BadSyncPath";
  }
  return "?";
}

std::string describe(const Violation& v) {
  std::string out = to_string(v.kind);
  auto field = [&](const char* name, int value) {
    if (value != kNone) out += std::string(" ") + name + "=" + std::to_string(value);
  };
  field("sfc", v.sfc);
  field("demand", v.demand);
  field("vnf", v.vnf);
  field("server", v.server);
  field("link", v.link);
  if (!v.detail.empty()) out += " (" + v.detail + ")";
  return out;
}

Violations validate_routing(const PlacementState& state, const Scenario& sc) {
  Violations out;
  const auto active = active_demands(sc);
  for (const Sfc& s : sc.sfcs) {
    for (int d : s.demands) {
      const PathId p = route_of(state, d);
      if (p == kNone) {
        out.push_back({ViolationKind::MissingRoute, s.id, d});
      } else if (std::find(s.admissible_paths.begin(), s.admissible_paths.end(), p) ==
                 s.admissible_paths.end()) {
        out.push_back({ViolationKind::InadmissiblePath, s.id, d, kNone, kNone, kNone,
                       "path " + std::to_string(p)});
      }
    }
  }
  for (std::size_t d = 0; d < state.route.size(); ++d) {
    const bool has = state.route[d] != kNone || !servers_of(state, static_cast<int>(d)).empty();
    if (has && (d >= active.size() || !active[d])) {
      out.push_back({ViolationKind::UnexpectedRoute, kNone, static_cast<int>(d)});
    }
  }
  return out;
}

Violations validate_vnf_placement(const PlacementState& state, const Scenario& sc) {
  Violations out;
  for (const Sfc& s : sc.sfcs) {
    for (int d : s.demands) {
      const PathId p = route_of(state, d);
      const auto& xs = servers_of(state, d);
      for (int v = 0; v < s.length(); ++v) {
        const ServerId x = v < static_cast<int>(xs.size()) ? xs[v] : kNone;
        if (x == kNone) {
          out.push_back({ViolationKind::MissingVnf, s.id, d, v});
        } else if (!valid_server(sc, x)) {
          out.push_back({ViolationKind::UnknownServer, s.id, d, v, x});
        } else if (valid_path(sc, p) && !sc.net().path(p).contains_server(x)) {
          out.push_back({ViolationKind::OffPathAssignment, s.id, d, v, x, kNone,
                         "path " + std::to_string(p)});
        }
      }
      if (static_cast<int>(xs.size()) > s.length()) {
        out.push_back({ViolationKind::MissingVnf, s.id, d, kNone, kNone, kNone,
                       "more assignments than chain positions"});
      }
    }
  }
  return out;
}

Violations validate_sequence_order(const PlacementState& state, const Scenario& sc) {
  Violations out;
  for (const Sfc& s : sc.sfcs) {
    for (int d : s.demands) {
      const PathId p = route_of(state, d);
      if (!valid_path(sc, p)) continue;
      const Path& path = sc.net().path(p);
      const auto& xs = servers_of(state, d);
      int prev = kNone;
      for (int v = 0; v < std::min(s.length(), static_cast<int>(xs.size())); ++v) {
        if (!valid_server(sc, xs[v])) {
          prev = kNone;
          continue;
        }
        const int pos = path.node_position(sc.net().server(xs[v]).node);
        if (pos == kNone) {
          prev = kNone;
          continue;
        }
        if (prev != kNone && pos < prev) {
          out.push_back({ViolationKind::OrderViolation, s.id, d, v, xs[v]});
        }
        prev = pos;
      }
    }
  }
  return out;
}

Violations validate_replication_limit(const PlacementState& state, const Scenario& sc) {
  Violations out;
  const Occupancy occ = build_occupancy(state, sc);
  for (const Sfc& s : sc.sfcs) {
    for (int v = 0; v < s.length(); ++v) {
      const int count = occ.instance_count(s.id, v);
      const int limit = sc.vnf(s.id, v).replicable ? occ.active_paths(s.id) : 1;
      if (count > limit) {
        out.push_back({ViolationKind::ReplicationViolation, s.id, kNone, v, kNone, kNone,
                       std::to_string(count) + " instances, limit " + std::to_string(limit)});
      }
    }
  }
  return out;
}

Violations validate_capacities(const PlacementState& state, const Scenario& sc) {
  Violations out;
  const Occupancy occ = build_occupancy(state, sc);
  for (const Link& l : sc.net().links()) {
    if (l.unlimited()) continue;
    if (occ.link_load(l.id) > l.capacity_max) {
      out.push_back({ViolationKind::LinkCapacity, kNone, kNone, kNone, kNone, l.id,
                     "load " + std::to_string(occ.link_load(l.id))});
    }
  }
  for (const Server& x : sc.net().servers()) {
    if (occ.server_load(x.id) > x.capacity_max) {
      out.push_back({ViolationKind::ServerCapacity, kNone, kNone, kNone, x.id, kNone,
                     "load " + std::to_string(occ.server_load(x.id))});
    }
  }
  return out;
}

Violations validate_sync_routes(const PlacementState& state, const Scenario& sc) {
  Violations out;
  const Occupancy occ = build_occupancy(state, sc);
  std::set<SyncKey> expected;
  for (const Sfc& s : sc.sfcs) {
    for (int v = 0; v < s.length(); ++v) {
      for (const auto& [n, m] : sync_pairs(occ, sc, s.id, v)) expected.insert({s.id, v, n, m});
    }
  }
  for (const SyncKey& k : expected) {
    if (!state.sync.count(k)) {
      out.push_back({ViolationKind::MissingSyncRoute, k.sfc, kNone, k.vnf, kNone, kNone,
                     std::to_string(k.from) + "->" + std::to_string(k.to)});
    }
  }
  for (const auto& [k, p] : state.sync) {
    if (!expected.count(k)) {
      out.push_back({ViolationKind::SpuriousSyncRoute, k.sfc, kNone, k.vnf, kNone, kNone,
                     std::to_string(k.from) + "->" + std::to_string(k.to)});
      continue;
    }
    const auto it = sc.net().catalog().sync_paths.find({k.from, k.to});
    const bool ok = it != sc.net().catalog().sync_paths.end() &&
                    std::find(it->second.begin(), it->second.end(), p) != it->second.end();
    if (!ok) {
      out.push_back({ViolationKind::BadSyncPath, k.sfc, kNone, k.vnf, kNone, kNone,
                     "path " + std::to_string(p)});
    }
  }
  return out;
}

Violations validate_all(const PlacementState& state, const Scenario& sc) {
  Violations out;
  for (auto* f : {validate_routing, validate_vnf_placement, validate_sequence_order,
                  validate_replication_limit, validate_capacities, validate_sync_routes}) {
    auto part = f(state, sc);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

PlacementState assign_sync_routes(const PlacementState& state, const Scenario& scenario) {
  Placement pl(scenario, state);
  pl.assign_all_sync();
  return pl.state();
}

// ---------------------------------------------------------------------------
// Migration and replication counts

int count_migrations(const Placement& placement) {
  const auto& snap = placement.state().snapshot;
  if (!snap) throw std::logic_error("migration count needs an initial snapshot");
  const Scenario& sc = placement.scenario();
  int n = 0;
  for (const InstanceKey& k : *snap) {
    if (k.sfc < 0 || k.sfc >= static_cast<int>(sc.sfcs.size()) || k.vnf < 0 ||
        k.vnf >= sc.sfcs[k.sfc].length()) {
      continue;
    }
    if (!placement.occupancy().hosts(k.sfc, k.vnf, k.server)) ++n;
  }
  return n;
}

int count_replications(const Placement& placement) {
  int n = 0;
  for (const Sfc& s : placement.scenario().sfcs) {
    for (int v = 0; v < s.length(); ++v) {
      n += std::max(0, placement.occupancy().instance_count(s.id, v) - 1);
    }
  }
  return n;
}

int count_migrations(const PlacementState& state, const Scenario& scenario) {
  return count_migrations(Placement(scenario, state));
}

int count_replications(const PlacementState& state, const Scenario& scenario) {
  return count_replications(Placement(scenario, state));
}

// ---------------------------------------------------------------------------
// Placement documents

std::string dump_placement(const PlacementState& state, const std::string& scenario_path) {
  json j;
  j["format"] = "sfcplace-placement/1";
  j["scenario"] = scenario_path;
  json demands = json::array();
  for (std::size_t d = 0; d < state.route.size(); ++d) {
    if (state.route[d] == kNone && state.servers[d].empty()) continue;
    demands.push_back({{"id", d}, {"path", state.route[d]}, {"servers", state.servers[d]}});
  }
  j["demands"] = demands;
  json sync = json::array();
  for (const auto& [k, p] : state.sync) sync.push_back({k.sfc, k.vnf, k.from, k.to, p});
  j["sync"] = sync;
  if (state.snapshot) {
    json snap = json::array();
    for (const auto& k : *state.snapshot) snap.push_back({k.sfc, k.vnf, k.server});
    j["snapshot"] = snap;
  } else {
    j["snapshot"] = nullptr;
  }
  return j.dump(1) + "\n";
}

PlacementState load_placement(const std::string& text, const Scenario& scenario) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("placement is not valid JSON: ") + e.what());
  }
  try {
    PlacementState st = PlacementState::empty(scenario);
    for (const auto& jd : j.at("demands")) {
      const int d = jd.at("id").get<int>();
      if (d < 0 || d >= static_cast<int>(scenario.demands.size())) {
        throw ParseError("placement references unknown demand " + std::to_string(d));
      }
      st.route[d] = jd.at("path").get<int>();
      st.servers[d] = jd.at("servers").get<std::vector<int>>();
    }
    for (const auto& js : j.at("sync")) {
      const auto v = js.get<std::vector<int>>();
      if (v.size() != 5) throw ParseError("sync entries need 5 fields");
      st.sync[SyncKey{v[0], v[1], v[2], v[3]}] = v[4];
    }
    if (j.contains("snapshot") && !j["snapshot"].is_null()) {
      Snapshot snap;
      for (const auto& js : j["snapshot"]) {
        const auto v = js.get<std::vector<int>>();
        if (v.size() != 3) throw ParseError("snapshot entries need 3 fields");
        snap.insert(InstanceKey{v[0], v[1], v[2]});
      }
      st.snapshot = std::move(snap);
    }
    return st;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed placement: ") + e.what());
  }
}

std::string placement_scenario_path(const std::string& text) {
  try {
    const json j = json::parse(text);
    return j.value("scenario", std::string());
  } catch (const json::exception& e) {
    throw ParseError(std::string("placement is not valid JSON: ") + e.what());
  }
}

}  // namespace sfcplace
