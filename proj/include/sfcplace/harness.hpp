#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfcplace/cost.hpp"
#include "sfcplace/exact.hpp"
#include "sfcplace/heuristics.hpp"
#include "sfcplace/workload.hpp"

namespace sfcplace {

// Master seed -> independent child seeds. Modes and algorithms run with the
// same master seed therefore see identical workloads.
struct SeedPolicy {
  std::uint64_t scenario;
  std::uint64_t partition;
  std::uint64_t algorithm;

  static SeedPolicy from_master(std::uint64_t master);
};

struct ExperimentPlan {
  std::string topology;
  CatalogOptions catalog;
  std::vector<int> chain_lengths;
  std::vector<ChainMode> modes;
  std::vector<std::string> algorithms;  // ff, rf, grd, exact
  std::vector<std::uint64_t> seeds;
  ScenarioParams base;                  // R, rho, D_net, D_dwt, both_directions
  int sweeps = 1;
  SearchScope scope = SearchScope::NewDemands;
  ExactLimits exact_limits;
  int workers = 0;  // 0: SFCPLACE_WORKERS or 1
};

struct ResultRow {
  int chain_length = 0;
  ChainMode mode = ChainMode::VmOnly;
  std::string algorithm;
  std::uint64_t seed = 0;
  int phase = 1;
  bool feasible = false;
  std::string diagnostics;
  CostBreakdown cost;
  double avg_link_util = 0.0;
  double avg_server_util = 0.0;
  double avg_service_delay = 0.0;
  double runtime_s = 0.0;
};

struct TwoPhaseResult {
  ResultRow phase1;
  ResultRow phase2;
  std::optional<PlacementState> state1;
  std::optional<PlacementState> state2;
};

struct RunOptions {
  int sweeps = 1;
  SearchScope scope = SearchScope::NewDemands;
  ExactLimits exact_limits;
};

// Builds the scenario of one plan cell (generation plus initial selection).
Scenario make_scenario(std::shared_ptr<const NetworkModel> network, const ScenarioParams& base,
                       int chain_length, ChainMode mode, std::uint64_t master_seed);

// Phase 1 places the initial demands without snapshot (one path per SFC);
// its instances become the snapshot of phase 2, which places every demand.
TwoPhaseResult run_two_phase(const Scenario& scenario, const std::string& algorithm,
                             std::uint64_t master_seed, const RunOptions& options = {});

// Fills the metric fields of a row from a complete placement.
void fill_metrics(ResultRow& row, const Placement& placement);

// Runs every (length, mode, algorithm, seed) cell; rows ordered by cell key.
std::vector<ResultRow> run_plan(const ExperimentPlan& plan);

struct SeriesPoint {
  int phase = 1;
  ChainMode mode = ChainMode::VmOnly;
  std::string algorithm;
  int chain_length = 0;
  int n = 0;  // feasible seeds
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for n < 2
};

// Metric names: total_costs, edge_opex, cloud_charges, penalties, migrations,
// replications, link_util, server_util, service_delay.
const std::vector<std::string>& series_names();
double metric_value(const ResultRow& row, const std::string& metric);
std::vector<SeriesPoint> series(const std::vector<ResultRow>& rows, const std::string& metric);

std::string results_csv(const std::vector<ResultRow>& rows);
std::string results_json(const std::vector<ResultRow>& rows);
std::string series_csv(const std::vector<SeriesPoint>& points);
std::string summary_markdown(const std::vector<ResultRow>& rows);

// Writes results.csv, results.json, series/*.csv and summary.md into dir.
void write_report(const std::vector<ResultRow>& rows, const std::string& dir);

// "1..10", "1,3,5" or a mix such as "1..3,8".
std::vector<int> parse_int_list(const std::string& text);
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace sfcplace
