#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support/fixtures.hpp"
#include "sfcplace/error.hpp"
#include "sfcplace/harness.hpp"
#include "sfcplace/rng.hpp"

using namespace sfcplace;
namespace fs = std::filesystem;

namespace {

std::string net7_path() { return std::string(SFCPLACE_DATA_DIR) + "/net7.topo"; }

std::shared_ptr<const NetworkModel> net7() {
  static auto net = std::make_shared<const NetworkModel>(load_topology_file(net7_path()));
  return net;
}

ExperimentPlan small_plan() {
  ExperimentPlan plan;
  plan.topology = net7_path();
  plan.chain_lengths = {1, 2};
  plan.modes = {ChainMode::VmOnly, ChainMode::CtOnly};
  plan.algorithms = {"ff", "grd"};
  plan.seeds = {1, 2};
  plan.workers = 1;
  return plan;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(SeedPolicy, ChildrenDerivedFromMaster) {
  const SeedPolicy p = SeedPolicy::from_master(42);
  EXPECT_EQ(p.scenario, Rng::derive(42, "scenario"));
  EXPECT_EQ(p.partition, Rng::derive(p.scenario, "partition"));
  EXPECT_EQ(p.algorithm, Rng::derive(42, "algorithm"));
  EXPECT_NE(p.scenario, p.algorithm);
  const SeedPolicy q = SeedPolicy::from_master(43);
  EXPECT_NE(p.scenario, q.scenario);
}

TEST(MakeScenario, ModesShareTheWorkload) {
  const Scenario a = make_scenario(net7(), {}, 3, ChainMode::VmOnly, 5);
  const Scenario b = make_scenario(net7(), {}, 3, ChainMode::CtOnly, 5);
  ASSERT_EQ(a.demands.size(), b.demands.size());
  for (std::size_t i = 0; i < a.demands.size(); ++i) {
    EXPECT_EQ(a.demands[i].bandwidth, b.demands[i].bandwidth);
    EXPECT_EQ(a.demands[i].in_initial_set, b.demands[i].in_initial_set);
  }
}

TEST(RunTwoPhase, RowsAndPhases) {
  const Scenario sc = make_scenario(net7(), {}, 2, ChainMode::VmCt, 3);
  const TwoPhaseResult r = run_two_phase(sc, "grd", 3);
  ASSERT_TRUE(r.phase1.feasible) << r.phase1.diagnostics;
  ASSERT_TRUE(r.phase2.feasible) << r.phase2.diagnostics;
  EXPECT_EQ(r.phase1.phase, 1);
  EXPECT_EQ(r.phase2.phase, 2);
  EXPECT_EQ(r.phase1.cost.n_mgr, 0);
  EXPECT_EQ(r.phase1.cost.n_rep, 0);
  EXPECT_EQ(r.phase1.cost.total, total_cost(*r.state1, initial_instance(sc)).total);
  EXPECT_EQ(r.phase2.cost.total, total_cost(*r.state2, sc).total);
  // Phase 2 is measured against the instances of phase 1.
  ASSERT_TRUE(r.state2->snapshot);
  EXPECT_EQ(*r.state2->snapshot, take_snapshot(Placement(initial_instance(sc), *r.state1)));
  // Initial demands stay unrouted outside phase 1 only when not initial.
  for (const TrafficDemand& d : sc.demands) {
    EXPECT_EQ(r.state1->route[d.id] != kNone, d.in_initial_set);
    EXPECT_NE(r.state2->route[d.id], kNone);
  }
}

TEST(RunTwoPhase, Deterministic) {
  const Scenario sc = make_scenario(net7(), {}, 3, ChainMode::VmOnly, 8);
  for (const char* alg : {"ff", "rf", "grd"}) {
    const TwoPhaseResult a = run_two_phase(sc, alg, 8);
    const TwoPhaseResult b = run_two_phase(sc, alg, 8);
    EXPECT_EQ(a.state2, b.state2) << alg;
  }
}

TEST(RunTwoPhase, UnknownAlgorithm) {
  const Scenario sc = make_scenario(net7(), {}, 1, ChainMode::VmOnly, 1);
  EXPECT_THROW(run_two_phase(sc, "sa", 1), ParseError);
}

TEST(RunTwoPhase, ExactRefusedOnNet7) {
  const Scenario sc = make_scenario(net7(), {}, 3, ChainMode::CtOnly, 1);
  const TwoPhaseResult r = run_two_phase(sc, "exact", 1);
  EXPECT_FALSE(r.phase1.feasible);
  EXPECT_NE(r.phase1.diagnostics.find("refused"), std::string::npos);
  EXPECT_FALSE(r.phase2.feasible);
  EXPECT_NE(r.phase2.diagnostics.find("skipped"), std::string::npos);
}

TEST(RunTwoPhase, ExactOnTinyScenario) {
  const Scenario sc = fixtures::build(fixtures::square(),
                                      {{0, 2, {kCtType}, {5, 6}, {true, false}}});
  const TwoPhaseResult r = run_two_phase(sc, "exact", 1);
  ASSERT_TRUE(r.phase1.feasible) << r.phase1.diagnostics;
  ASSERT_TRUE(r.phase2.feasible) << r.phase2.diagnostics;
  const TwoPhaseResult g = run_two_phase(sc, "grd", 1);
  ASSERT_TRUE(g.phase2.feasible);
  EXPECT_LE(r.phase1.cost.total, g.phase1.cost.total + 1e-12);
}

TEST(RunPlan, RowOrderAndCount) {
  const auto rows = run_plan(small_plan());
  ASSERT_EQ(rows.size(), 2u * 2 * 2 * 2 * 2);
  // Cells in (length, mode, algorithm, seed) order, phases adjacent.
  EXPECT_EQ(rows[0].chain_length, 1);
  EXPECT_EQ(rows[0].phase, 1);
  EXPECT_EQ(rows[1].phase, 2);
  EXPECT_EQ(rows[1].seed, rows[0].seed);
  EXPECT_EQ(rows.back().chain_length, 2);
  for (const ResultRow& r : rows) EXPECT_TRUE(r.feasible) << r.diagnostics;
}

TEST(RunPlan, WorkersDoNotChangeResults) {
  ExperimentPlan plan = small_plan();
  const std::string one = results_csv(run_plan(plan));
  plan.workers = 4;
  EXPECT_EQ(results_csv(run_plan(plan)), one);
}

TEST(RunPlan, RejectsEmptyPlan) {
  ExperimentPlan plan = small_plan();
  plan.seeds.clear();
  EXPECT_THROW(run_plan(plan), ModelError);
}

TEST(Series, NamesAndValues) {
  EXPECT_EQ(series_names().size(), 9u);
  ResultRow r;
  r.cost = {1, 2, 3, 6, 4, 5};
  r.avg_link_util = 0.1;
  r.avg_server_util = 0.2;
  r.avg_service_delay = 7;
  EXPECT_EQ(metric_value(r, "total_costs"), 6);
  EXPECT_EQ(metric_value(r, "edge_opex"), 1);
  EXPECT_EQ(metric_value(r, "cloud_charges"), 2);
  EXPECT_EQ(metric_value(r, "penalties"), 3);
  EXPECT_EQ(metric_value(r, "migrations"), 4);
  EXPECT_EQ(metric_value(r, "replications"), 5);
  EXPECT_EQ(metric_value(r, "link_util"), 0.1);
  EXPECT_EQ(metric_value(r, "server_util"), 0.2);
  EXPECT_EQ(metric_value(r, "service_delay"), 7);
  EXPECT_THROW(metric_value(r, "latency"), std::invalid_argument);
}

TEST(Series, MeanAndSampleStddevOverFeasibleRows) {
  std::vector<ResultRow> rows(4);
  const double totals[4] = {1, 3, 5, 100};
  for (int i = 0; i < 4; ++i) {
    rows[i].algorithm = "grd";
    rows[i].chain_length = 2;
    rows[i].feasible = i < 3;
    rows[i].cost.total = totals[i];
  }
  const auto pts = series(rows, "total_costs");
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].n, 3);
  EXPECT_DOUBLE_EQ(pts[0].mean, 3.0);
  EXPECT_DOUBLE_EQ(pts[0].stddev, 2.0);
  rows.resize(1);
  EXPECT_EQ(series(rows, "total_costs")[0].stddev, 0.0);
}

TEST(Report, CsvHeaderAndTotals) {
  const auto rows = run_plan(small_plan());
  const std::string csv = results_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "chain_length,mode,algorithm,seed,phase,feasible,total,edge_opex,cloud_charges,penalties,"
            "n_mgr,n_rep,avg_link_util,avg_server_util,avg_service_delay");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(rows.size()) + 1);
  for (const ResultRow& r : rows) {
    EXPECT_EQ(r.cost.total, r.cost.edge_opex + r.cost.cloud_charges + r.cost.penalties);
  }
  std::vector<ResultRow> bad(1);
  bad[0].cost.total = 1.0;
  EXPECT_THROW(results_csv(bad), std::logic_error);
}

TEST(Report, SummaryShowsMeanAndSpread) {
  const auto rows = run_plan(small_plan());
  const std::string md = summary_markdown(rows);
  EXPECT_NE(md.find("## Phase 1"), std::string::npos);
  EXPECT_NE(md.find("## Phase 2"), std::string::npos);
  EXPECT_NE(md.find(" ± "), std::string::npos);
  EXPECT_EQ(md.find("## Failed cells"), std::string::npos);
}

TEST(Report, WritesAllFiles) {
  const fs::path dir = fs::temp_directory_path() / "sfcplace_test_report";
  fs::remove_all(dir);
  const auto rows = run_plan(small_plan());
  write_report(rows, dir.string());
  EXPECT_EQ(slurp(dir / "results.csv"), results_csv(rows));
  EXPECT_TRUE(fs::exists(dir / "results.json"));
  EXPECT_TRUE(fs::exists(dir / "summary.md"));
  for (const auto& name : series_names()) EXPECT_TRUE(fs::exists(dir / "series" / (name + ".csv"))) << name;
  fs::remove_all(dir);
}

TEST(ParseLists, RangesAndCommas) {
  EXPECT_EQ(parse_int_list("1..4"), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(parse_int_list("1,3,5"), (std::vector<int>{1, 3, 5}));
  EXPECT_EQ(parse_int_list("1..3,8"), (std::vector<int>{1, 2, 3, 8}));
  EXPECT_EQ(parse_seed_list("7"), (std::vector<std::uint64_t>{7}));
  EXPECT_THROW(parse_int_list("a"), ParseError);
  EXPECT_THROW(parse_int_list("3..1"), ParseError);
}
