#pragma once

#include <vector>

#include "sfcplace/state.hpp"

namespace sfcplace {

struct DelayBreakdown {
  double prop = 0.0;      // ms
  double proc = 0.0;      // ms
  double downtime = 0.0;  // ms
  double total = 0.0;     // prop + proc + downtime
};

struct CostBreakdown {
  double edge_opex = 0.0;      // $/h
  double cloud_charges = 0.0;  // $/h
  double penalties = 0.0;      // $/h
  double total = 0.0;          // edge_opex + cloud_charges + penalties
  int n_mgr = 0;
  int n_rep = 0;
};

// Queueing plus server-dependent delay of the instance of (sfc, vnf) on x.
// Throws std::invalid_argument if x hosts no such instance.
double processing_delay(const Placement& placement, ServerId x, int sfc, int vnf);

// D_dwt times the snapshot instances of `sfc` that are gone; 0 without snapshot.
double downtime(const Placement& placement, int sfc);

// Throws std::invalid_argument for an unrouted demand.
DelayBreakdown demand_delay(const Placement& placement, int demand);

// Positive part of (delay / d_max - 1) * penalty_rate.
double penalty_for_delay(const Sfc& sfc, double total_delay);
double penalty(const Placement& placement, int demand);

double server_opex(const Placement& placement, ServerId x);
double edge_opex(const Placement& placement);
double cloud_charges(const Placement& placement);

// Sums in a fixed order: edge servers by id, cloud servers by id, demands by
// SFC then listing order. Does not validate.
CostBreakdown total_cost(const Placement& placement);
// Validates first; throws ModelError naming the first violations.
CostBreakdown total_cost(const PlacementState& state, const Scenario& scenario);

// Mean end-to-end delay over the instance's routed demands (0 if none).
double average_service_delay(const Placement& placement);
// Mean utilization over finite links and edge servers.
double average_link_utilization(const Placement& placement);
double average_server_utilization(const Placement& placement);

}  // namespace sfcplace
