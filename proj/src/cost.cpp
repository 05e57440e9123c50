#include "sfcplace/cost.hpp"

#include <algorithm>
#include <stdexcept>

#include "sfcplace/error.hpp"

namespace sfcplace {

double processing_delay(const Placement& placement, ServerId x, int sfc, int vnf) {
  const auto& inst = placement.occupancy().instances(sfc, vnf);
  const auto it = inst.find(x);
  if (it == inst.end()) {
    throw std::invalid_argument("VNF " + std::to_string(vnf) + " of SFC " + std::to_string(sfc) +
                                " is not placed on server " + std::to_string(x));
  }
  const VnfType& t = placement.scenario().vnf(sfc, vnf);
  const double queue = t.delay_queue * (t.load_ratio * it->second.traffic) / t.proc_capacity_max;
  return queue + t.delay_proc_min + t.delay_proc_slope * placement.occupancy().server_util(x);
}

double downtime(const Placement& placement, int sfc) {
  const auto& snap = placement.state().snapshot;
  if (!snap) return 0.0;
  int gone = 0;
  for (auto it = snap->lower_bound(InstanceKey{sfc, kNone, kNone});
       it != snap->end() && it->sfc == sfc; ++it) {
    if (it->vnf < 0 || it->vnf >= placement.scenario().sfcs[sfc].length()) continue;
    if (!placement.occupancy().hosts(sfc, it->vnf, it->server)) ++gone;
  }
  return placement.scenario().params.d_dwt * gone;
}

DelayBreakdown demand_delay(const Placement& placement, int demand) {
  const PlacementState& st = placement.state();
  if (st.route[demand] == kNone) {
    throw std::invalid_argument("demand " + std::to_string(demand) + " is not routed");
  }
  const int sfc = placement.scenario().demands[demand].sfc;
  const int len = placement.scenario().sfcs[sfc].length();
  if (static_cast<int>(st.servers[demand].size()) != len) {
    throw std::invalid_argument("demand " + std::to_string(demand) + " has an incomplete chain");
  }
  DelayBreakdown d;
  d.prop = placement.scenario().net().path(st.route[demand]).total_prop_delay;
  for (int v = 0; v < len; ++v) d.proc += processing_delay(placement, st.servers[demand][v], sfc, v);
  d.downtime = downtime(placement, sfc);
  d.total = d.prop + d.proc + d.downtime;
  return d;
}

double penalty_for_delay(const Sfc& sfc, double total_delay) {
  return std::max(0.0, (total_delay / sfc.d_max - 1.0) * sfc.penalty_rate);
}

double penalty(const Placement& placement, int demand) {
  const Sfc& s = placement.scenario().sfcs[placement.scenario().demands[demand].sfc];
  return penalty_for_delay(s, demand_delay(placement, demand).total);
}

double server_opex(const Placement& placement, ServerId x) {
  const Server& server = placement.scenario().net().server(x);
  const Occupancy& occ = placement.occupancy();
  const double active = occ.hosted_count(x) > 0 ? 1.0 : 0.0;
  return active * server.idle_energy_cost + server.utilization_cost_slope * occ.server_util(x) +
         server.fixed_maintenance_cost;
}

double edge_opex(const Placement& placement) {
  double sum = 0.0;
  for (const Server& x : placement.scenario().net().servers()) {
    if (!x.is_cloud) sum += server_opex(placement, x.id);
  }
  return sum;
}

double cloud_charges(const Placement& placement) {
  const Scenario& sc = placement.scenario();
  double sum = 0.0;
  for (const Server& x : sc.net().servers()) {
    if (!x.is_cloud) continue;
    for (const auto& [key, use] : placement.occupancy().hosted(x.id)) {
      sum += sc.vnf(key.first, key.second).cloud_price;
    }
  }
  return sum;
}

CostBreakdown total_cost(const Placement& placement) {
  CostBreakdown c;
  c.edge_opex = edge_opex(placement);
  c.cloud_charges = cloud_charges(placement);
  const Scenario& sc = placement.scenario();
  for (const Sfc& s : sc.sfcs) {
    for (int d : s.demands) {
      if (!placement.routed(d)) continue;
      c.penalties += penalty_for_delay(s, demand_delay(placement, d).total);
    }
  }
  c.total = c.edge_opex + c.cloud_charges + c.penalties;
  c.n_mgr = placement.state().snapshot ? count_migrations(placement) : 0;
  c.n_rep = count_replications(placement);
  return c;
}

CostBreakdown total_cost(const PlacementState& state, const Scenario& scenario) {
  const Violations v = validate_all(state, scenario);
  if (!v.empty()) {
    std::string msg = "cannot cost an invalid placement: " + describe(v.front());
    if (v.size() > 1) msg += " (+" + std::to_string(v.size() - 1) + " more)";
    throw ModelError(msg);
  }
  return total_cost(Placement(scenario, state));
}

double average_service_delay(const Placement& placement) {
  double sum = 0.0;
  int n = 0;
  for (const Sfc& s : placement.scenario().sfcs) {
    for (int d : s.demands) {
      if (!placement.routed(d)) continue;
      sum += demand_delay(placement, d).total;
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / n;
}

double average_link_utilization(const Placement& placement) {
  const NetworkModel& net = placement.scenario().net();
  double sum = 0.0;
  int n = 0;
  for (const Link& l : net.links()) {
    if (l.unlimited() || net.link_touches_cloud(l.id)) continue;
    sum += placement.occupancy().link_util(l.id);
    ++n;
  }
  return n == 0 ? 0.0 : sum / n;
}

double average_server_utilization(const Placement& placement) {
  double sum = 0.0;
  int n = 0;
  for (const Server& x : placement.scenario().net().servers()) {
    if (x.is_cloud) continue;
    sum += placement.occupancy().server_util(x.id);
    ++n;
  }
  return n == 0 ? 0.0 : sum / n;
}

}  // namespace sfcplace
