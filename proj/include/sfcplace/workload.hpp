#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sfcplace/topology.hpp"

namespace sfcplace {

enum class ExecMode { VM, CT };

struct VnfType {
  std::string name;
  ExecMode exec_mode = ExecMode::VM;
  double overhead = 0.0;            // processing units reserved per instance
  double load_ratio = 0.0;          // processing units per traffic unit
  double sync_ratio = 0.0;          // sync traffic per demand between replicas
  double proc_capacity_max = 0.0;   // max processing load one instance handles
  double delay_queue = 0.0;         // ms at full instance load
  double delay_proc_slope = 0.0;    // ms per unit of server utilization
  double delay_proc_min = 0.0;      // ms, load independent
  double delay_proc_max = 0.0;      // ms, upper bound of one VNF's delay
  double cloud_price = 0.0;         // $/h, also the selling price
  bool replicable = true;
};

enum class ChainMode { VmOnly, CtOnly, VmCt };

std::string to_string(ChainMode mode);
ChainMode parse_chain_mode(const std::string& text);

struct TrafficDemand {
  int id = kNone;
  int sfc = kNone;
  double bandwidth = 0.0;
  bool in_initial_set = false;
};

struct Sfc {
  int id = kNone;
  NodeId src = kNone;
  NodeId dst = kNone;
  std::vector<int> vnf_chain;  // indices into Scenario::vnf_catalog
  std::vector<int> demands;    // demand ids of this placement instance
  std::vector<PathId> admissible_paths;
  double d_max = 0.0;          // ms
  double d_hat_max = 0.0;      // ms
  double penalty_rate = 0.0;   // $/h

  int length() const { return static_cast<int>(vnf_chain.size()); }
};

struct ScenarioParams {
  double d_net = 5.0;
  double d_dwt = 27.5;
  double penalty_fraction = 0.1;
  double initial_selection_prob = 0.3;
  std::uint64_t seed = 1;
  ChainMode mode = ChainMode::VmOnly;
  int chain_length = 1;
  bool both_directions = true;
};

// A placement instance: SFCs with the demands to place. `demands` is indexed by
// demand id and always holds every demand; Sfc::demands lists the ones active
// in this instance (all of them, or only the initial subset for phase 1).
struct Scenario {
  std::shared_ptr<const NetworkModel> network;
  std::vector<VnfType> vnf_catalog;
  std::vector<Sfc> sfcs;
  std::vector<TrafficDemand> demands;
  ScenarioParams params;
  std::string topology_path;  // informational, used by scenario files

  const NetworkModel& net() const { return *network; }
  const VnfType& vnf(int sfc, int position) const {
    return vnf_catalog[sfcs[sfc].vnf_chain[position]];
  }
  int active_demand_count() const;
};

// Table of VNF parameters: index 0 is the VM flavor, index 1 the CT flavor.
std::vector<VnfType> default_vnf_catalog();
inline constexpr int kVmType = 0;
inline constexpr int kCtType = 1;

// Fills d_max, d_hat_max, penalty_rate and admissible paths of every SFC.
void derive_sfc_fields(Scenario& scenario);

// One SFC per ordered pair of non-cloud nodes, 1-3 demands of integer
// bandwidth in [1, 20], VNF flavors per `params.mode`.
Scenario generate_scenario(std::shared_ptr<const NetworkModel> network,
                           const ScenarioParams& params);

// Marks each demand initial with probability R (at least one per SFC).
// Deterministic per seed; one RNG substream per SFC.
void select_initial_demands(Scenario& scenario, std::uint64_t seed);

// Copy of `scenario` whose SFCs only list their initial demands.
Scenario initial_instance(const Scenario& scenario);

// Demands of `sfc` outside the initial set (the second-phase arrivals).
std::vector<int> later_demands(const Scenario& scenario, int sfc);
std::vector<int> initial_demands(const Scenario& scenario, int sfc);

// Scenario document (JSON). `load` resolves the topology relative to
// `base_dir` unless absolute; SFC/demand arrays, when present, override
// generation, otherwise the workload is generated from the stored seed.
std::string dump_scenario(const Scenario& scenario);
Scenario load_scenario(const std::string& text, const std::string& base_dir = ".");
Scenario load_scenario_file(const std::string& path);

}  // namespace sfcplace
