#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sfcplace/topology.hpp"
#include "sfcplace/workload.hpp"

namespace sfcplace {

// (sfc, chain position, server): one VNF instance.
struct InstanceKey {
  int sfc = kNone;
  int vnf = kNone;
  ServerId server = kNone;
  auto operator<=>(const InstanceKey&) const = default;
};

// Directed sync flow of VNF (sfc, vnf) from node `from` to node `to`.
struct SyncKey {
  int sfc = kNone;
  int vnf = kNone;
  NodeId from = kNone;
  NodeId to = kNone;
  auto operator<=>(const SyncKey&) const = default;
};

// Instances present after the initial placement.
using Snapshot = std::set<InstanceKey>;

// The decision variables in materialized form. Indexed by demand id; demands
// outside the current instance stay unrouted.
struct PlacementState {
  std::vector<PathId> route;                   // kNone when unrouted
  std::vector<std::vector<ServerId>> servers;  // server per chain position; empty when unrouted
  std::map<SyncKey, PathId> sync;
  std::optional<Snapshot> snapshot;

  static PlacementState empty(const Scenario& scenario);
  bool operator==(const PlacementState&) const = default;
};

struct InstanceUse {
  int demands = 0;
  double traffic = 0.0;  // sum of assigned bandwidth
};

// Aggregates derived from a PlacementState: per-server load, per-link
// traffic, instance sets and active paths. Entries referring to unknown ids
// are ignored here and reported by the validators.
class Occupancy {
 public:
  Occupancy() = default;
  explicit Occupancy(const Scenario& scenario);

  void add_demand(int demand, PathId path, const std::vector<ServerId>& servers);
  void remove_demand(int demand, PathId path, const std::vector<ServerId>& servers);
  // Rebuilds sync link traffic from the full sync map.
  void set_sync(const std::map<SyncKey, PathId>& sync);

  double server_load(ServerId x) const { return server_load_[x]; }
  double server_util(ServerId x) const;
  // Demand plus sync traffic on a link, in bandwidth units.
  double link_load(LinkId l) const { return link_demand_[l] + link_sync_[l]; }
  double link_demand(LinkId l) const { return link_demand_[l]; }
  double link_sync(LinkId l) const { return link_sync_[l]; }
  double link_util(LinkId l) const;

  const std::map<ServerId, InstanceUse>& instances(int sfc, int vnf) const {
    return instances_[sfc][vnf];
  }
  int instance_count(int sfc, int vnf) const {
    return static_cast<int>(instances_[sfc][vnf].size());
  }
  bool hosts(int sfc, int vnf, ServerId x) const { return instances_[sfc][vnf].count(x) > 0; }
  // Instances of any VNF hosted on x (f_x == 1 iff > 0).
  int hosted_count(ServerId x) const { return static_cast<int>(hosted_[x].size()); }
  const std::map<std::pair<int, int>, InstanceUse>& hosted(ServerId x) const { return hosted_[x]; }
  const std::map<PathId, int>& path_use(int sfc) const { return path_use_[sfc]; }
  int active_paths(int sfc) const { return static_cast<int>(path_use_[sfc].size()); }

 private:
  void recompute_server(ServerId x);

  const Scenario* sc_ = nullptr;
  std::vector<double> server_load_;
  std::vector<std::map<std::pair<int, int>, InstanceUse>> hosted_;
  std::vector<double> link_demand_;
  std::vector<double> link_sync_;
  std::vector<std::vector<std::map<ServerId, InstanceUse>>> instances_;
  std::vector<std::map<PathId, int>> path_use_;
};

// A state together with its occupancy, kept consistent under mutation.
class Placement {
 public:
  explicit Placement(const Scenario& scenario);
  Placement(const Scenario& scenario, PlacementState state);

  const Scenario& scenario() const { return *sc_; }
  const PlacementState& state() const { return state_; }
  const Occupancy& occupancy() const { return occ_; }

  void place_demand(int demand, PathId path, std::vector<ServerId> servers);
  void remove_demand(int demand);
  bool routed(int demand) const { return state_.route[demand] != kNone; }

  // Sync routes of one SFC: cleared, or re-selected for its current
  // instances (one path per ordered node pair hosting the same VNF).
  void clear_sync(int sfc);
  void assign_sync(int sfc);
  void assign_all_sync();
  std::map<SyncKey, PathId> sync_of(int sfc) const;
  void restore_sync(int sfc, const std::map<SyncKey, PathId>& routes);

  void set_snapshot(std::optional<Snapshot> snapshot) { state_.snapshot = std::move(snapshot); }

 private:
  const Scenario* sc_;
  PlacementState state_;
  Occupancy occ_;
};

// Instances of the current state, used as the snapshot of a later phase.
Snapshot take_snapshot(const Placement& placement);

struct UtilizationReport {
  std::vector<double> link_util;    // 0 for unlimited links
  std::vector<double> server_util;
  std::vector<double> server_load;
};

std::vector<double> link_utilization(const PlacementState& state, const Scenario& scenario);
UtilizationReport utilization(const Placement& placement);
UtilizationReport utilization(const PlacementState& state, const Scenario& scenario);

enum class ViolationKind {
  MissingRoute,
  UnexpectedRoute,
  InadmissiblePath,
  MissingVnf,
  UnknownServer,
  OffPathAssignment,
  OrderViolation,
  ReplicationViolation,
  LinkCapacity,
  ServerCapacity,
  MissingSyncRoute,
  SpuriousSyncRoute,
  BadSyncPath,
};

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  int sfc = kNone;
  int demand = kNone;
  int vnf = kNone;
  int server = kNone;
  int link = kNone;
  std::string detail;
};

std::string describe(const Violation& v);

using Violations = std::vector<Violation>;

Violations validate_routing(const PlacementState& state, const Scenario& scenario);
Violations validate_vnf_placement(const PlacementState& state, const Scenario& scenario);
Violations validate_sequence_order(const PlacementState& state, const Scenario& scenario);
Violations validate_replication_limit(const PlacementState& state, const Scenario& scenario);
Violations validate_capacities(const PlacementState& state, const Scenario& scenario);
Violations validate_sync_routes(const PlacementState& state, const Scenario& scenario);
// All of the above, in that order.
Violations validate_all(const PlacementState& state, const Scenario& scenario);

PlacementState assign_sync_routes(const PlacementState& state, const Scenario& scenario);

// Throws std::logic_error when the state has no snapshot.
int count_migrations(const PlacementState& state, const Scenario& scenario);
int count_replications(const PlacementState& state, const Scenario& scenario);
int count_migrations(const Placement& placement);
int count_replications(const Placement& placement);

// JSON placement document; round-trips exactly.
std::string dump_placement(const PlacementState& state, const std::string& scenario_path = "");
PlacementState load_placement(const std::string& text, const Scenario& scenario);
// Scenario path recorded in a placement document, or "".
std::string placement_scenario_path(const std::string& text);

}  // namespace sfcplace
