#include <gtest/gtest.h>

#include "sfcplace/cost.hpp"
#include "sfcplace/error.hpp"
#include "sfcplace/heuristics.hpp"
#include "support/fixtures.hpp"

using namespace sfcplace;
using fixtures::SfcDef;

namespace {

PathId find_path(const Scenario& sc, int sfc, const std::vector<NodeId>& nodes) {
  for (PathId p : sc.sfcs[sfc].admissible_paths) {
    if (sc.net().path(p).nodes == nodes) return p;
  }
  ADD_FAILURE() << "no admissible path with the requested nodes";
  return kNone;
}

HeuristicConfig config(Algorithm alg, std::uint64_t seed, int sweeps = 1) {
  HeuristicConfig c;
  c.algorithm = alg;
  c.seed = seed;
  c.local_search_sweeps = sweeps;
  return c;
}

}  // namespace

TEST(SimplePlacement, FirstFitUsesFirstPathAndServer) {
  const Scenario sc = fixtures::build(fixtures::square(), {SfcDef{0, 2, {kVmType, kVmType, kCtType}, {8}}});
  const PlacementState st = simple_placement(sc, Algorithm::FF, 1);
  const PathId first = sc.sfcs[0].admissible_paths.front();
  EXPECT_EQ(st.route[0], first);
  const ServerId x = sc.net().path(first).servers.front();
  EXPECT_EQ(st.servers[0], (std::vector<ServerId>{x, x, x}));
  EXPECT_TRUE(validate_all(st, sc).empty());
}

TEST(SimplePlacement, RandomFitReplays) {
  const Scenario sc = fixtures::random_tiny(77, true, 3, 3, 3);
  EXPECT_EQ(simple_placement(sc, Algorithm::RF, 5), simple_placement(sc, Algorithm::RF, 5));
}

TEST(SimplePlacement, OnlyCloudFits) {
  // A VM instance needs 1.2 * 5 + 7 = 13 units; edge servers have 10.
  const Scenario sc = fixtures::build(fixtures::square(10, 500), {SfcDef{0, 2, {kVmType, kVmType}, {5}}});
  for (Algorithm alg : {Algorithm::FF, Algorithm::RF}) {
    const PlacementState st = simple_placement(sc, alg, 3);
    EXPECT_TRUE(sc.net().path(st.route[0]).traverses_cloud);
    EXPECT_EQ(st.servers[0], (std::vector<ServerId>{4, 4}));
  }
  const PlacementState g = run_heuristic(sc, config(Algorithm::GRD, 3));
  EXPECT_EQ(g.servers[0], (std::vector<ServerId>{4, 4}));
}

TEST(SimplePlacement, InfeasibleNamesDemand) {
  const std::string text = "[nodes]\n0 - - 0 a\n1 - - 0 b\n[servers]\n0 0 10 0 0.01 0.01 0\n[links]\n0 1 50 1\n";
  const Scenario sc = fixtures::build(fixtures::network(text, {1, false, 1}), {SfcDef{0, 1, {kVmType}, {1, 40}}});
  try {
    simple_placement(sc, Algorithm::FF, 1);
    FAIL() << "expected InfeasibleDemand";
  } catch (const InfeasibleDemand& e) {
    // 1.2 * 1 + 7 fits on the 10-unit server, 1.2 * 41 + 7 does not.
    EXPECT_EQ(e.demand(), 1);
    EXPECT_NE(std::string(e.what()).find("demand 1"), std::string::npos);
  }
}

TEST(Heuristics, AllOutputsValidAndOrdered) {
  for (int i = 0; i < 60; ++i) {
    const Scenario sc = fixtures::random_tiny(600 + i, i % 2 == 0, 3, 3, 3);
    for (Algorithm alg : {Algorithm::FF, Algorithm::RF, Algorithm::GRD}) {
      try {
        const PlacementState st = run_heuristic(sc, config(alg, i));
        EXPECT_TRUE(validate_all(st, sc).empty()) << to_string(alg) << " instance " << i;
        for (const Sfc& s : sc.sfcs) {
          for (int d : s.demands) {
            const Path& p = sc.net().path(st.route[d]);
            for (int v = 1; v < s.length(); ++v) {
              EXPECT_LE(p.node_position(sc.net().server(st.servers[d][v - 1]).node),
                        p.node_position(sc.net().server(st.servers[d][v]).node));
            }
          }
        }
      } catch (const InfeasibleDemand&) {
      }
    }
  }
}

TEST(Heuristics, Deterministic) {
  const Scenario sc = fixtures::random_tiny(5, false, 3, 3, 3);
  for (Algorithm alg : {Algorithm::FF, Algorithm::RF, Algorithm::GRD}) {
    PlacementState a, b;
    try {
      a = run_heuristic(sc, config(alg, 9));
      b = run_heuristic(sc, config(alg, 9));
    } catch (const InfeasibleDemand&) {
      continue;
    }
    EXPECT_EQ(a, b);
  }
}

TEST(Heuristics, NegativeSweepsRejected) {
  const Scenario sc = fixtures::random_tiny(5, true);
  EXPECT_THROW(run_heuristic(sc, config(Algorithm::GRD, 1, -1)), ModelError);
}

TEST(Greedy, NoWorseThanFirstFitWhenAmple) {
  for (int i = 0; i < 20; ++i) {
    const Scenario sc = fixtures::random_tiny(700 + i, true, 2, 2, 2);
    const double ff = total_cost(run_heuristic(sc, config(Algorithm::FF, i)), sc).total;
    const double grd = total_cost(run_heuristic(sc, config(Algorithm::GRD, i)), sc).total;
    EXPECT_LE(grd, ff) << "instance " << i;
  }
}

TEST(Greedy, PhaseOneSinglePathHasNoMigrationsOrReplicas) {
  for (int i = 0; i < 30; ++i) {
    const Scenario sc = fixtures::random_tiny(800 + i, i % 2 == 0, 3, 3, 3);
    HeuristicConfig c = config(Algorithm::GRD, i);
    c.single_path_per_sfc = true;
    PlacementState st;
    try {
      st = run_heuristic(sc, c);
    } catch (const InfeasibleDemand&) {
      continue;
    }
    Placement pl(sc, st);
    EXPECT_EQ(count_replications(pl), 0);
    pl.set_snapshot(take_snapshot(pl));
    EXPECT_EQ(count_migrations(pl), 0);
    for (const Sfc& s : sc.sfcs) EXPECT_LE(pl.occupancy().active_paths(s.id), 1);
  }
}

TEST(Greedy, ReusesInitialPlacementWhenCloudIsForced) {
  // Phase 1 holds one demand per SFC; phase 2 adds demands that overflow
  // node 0's small server so one chain must leave for the cloud.
  const Scenario full = fixtures::build(
      fixtures::square(40, 500),
      {SfcDef{0, 2, {kVmType}, {10, 15}, {true, false}}, SfcDef{1, 3, {kVmType}, {5, 5}, {true, false}},
       SfcDef{2, 0, {kVmType}, {6}, {true}}, SfcDef{3, 1, {kVmType}, {4, 9}, {true, false}}});
  const Scenario first = initial_instance(full);
  HeuristicConfig c1 = config(Algorithm::GRD, 2);
  c1.single_path_per_sfc = true;
  const PlacementState phase1 = run_heuristic(first, c1);
  const PlacementState grd = run_heuristic(full, config(Algorithm::GRD, 2), &phase1);
  const PlacementState ff = run_heuristic(full, config(Algorithm::FF, 2), &phase1);
  ASSERT_TRUE(validate_all(grd, full).empty());
  ASSERT_TRUE(validate_all(ff, full).empty());
  const int grd_mgr = count_migrations(grd, full);
  const int ff_mgr = count_migrations(ff, full);
  EXPECT_LE(grd_mgr, ff_mgr);
  // The SFC whose source server cannot take the extra demand either uses
  // the cloud or another edge server; all other chains keep their servers.
  int kept = 0;
  const Placement pl(full, grd);
  for (const InstanceKey& k : *grd.snapshot) {
    kept += pl.occupancy().hosts(k.sfc, k.vnf, k.server) ? 1 : 0;
  }
  EXPECT_GE(kept, 3);
}

TEST(ChoosePath, Cascade) {
  const Scenario sc = fixtures::build(fixtures::square(), {SfcDef{0, 2, {kVmType}, {3, 4, 5}}});
  const auto& adm = sc.sfcs[0].admissible_paths;
  const PathId p012 = find_path(sc, 0, {0, 1, 2});
  const PathId p032 = find_path(sc, 0, {0, 3, 2});
  const PathId cloud = adm.back();

  // Fresh: shortest delay.
  const Placement empty(sc);
  EXPECT_EQ(choose_path_greedy(empty, nullptr, 0, {cloud, p032, p012}), p012);

  Placement init(sc);
  init.place_demand(0, p032, {3});
  init.place_demand(1, cloud, {4});
  // Own initial path.
  EXPECT_EQ(choose_path_greedy(empty, &init, 1, adm), cloud);
  // New demand: a path this SFC used initially, in candidate order.
  EXPECT_EQ(choose_path_greedy(empty, &init, 2, {p012, cloud, p032}), cloud);
  EXPECT_EQ(choose_path_greedy(empty, &init, 2, {p032, p012}), p032);
  // Without initial paths among the candidates: current use, then delay.
  Placement current(sc);
  current.place_demand(0, p032, {3});
  EXPECT_EQ(choose_path_greedy(current, nullptr, 2, adm), p032);
  EXPECT_EQ(choose_path_greedy(current, &init, 2, {p012}), p012);
  EXPECT_EQ(choose_path_greedy(current, nullptr, 2, {}), kNone);
}

TEST(ChooseServer, Cascade) {
  const Scenario sc = fixtures::build(fixtures::square(), {SfcDef{0, 2, {kVmType}, {3, 4}}});
  const PathId p012 = find_path(sc, 0, {0, 1, 2});
  const PathId cloud = find_path(sc, 0, {0, 1, 4, 3, 2});
  const Path& pc = sc.net().path(cloud);
  ASSERT_EQ(pc.servers, (std::vector<ServerId>{0, 1, 4, 3, 2}));
  const Placement empty(sc);

  // Fresh VNF, no cloud: first available.
  EXPECT_EQ(choose_server_greedy(empty, nullptr, 1, sc.net().path(p012), 0, 0, {0, 1, 2}), 0);

  // Initial instance at index 1, cloud at index 2: reused.
  Placement init(sc);
  init.place_demand(0, p012, {1});
  EXPECT_EQ(choose_server_greedy(empty, &init, 1, pc, 0, 0, pc.servers), 1);

  // Initial instance at index 3, behind the cloud at 2: not reused.
  Placement behind(sc);
  behind.place_demand(0, find_path(sc, 0, {0, 3, 2}), {3});
  EXPECT_EQ(choose_server_greedy(empty, &behind, 1, pc, 0, 0, pc.servers), 0);

  // The demand's own initial server wins regardless of position.
  Placement own(sc);
  own.place_demand(1, find_path(sc, 0, {0, 3, 2}), {3});
  EXPECT_EQ(choose_server_greedy(empty, &own, 1, pc, 0, 0, pc.servers), 3);

  // Servers before min_position are dropped first.
  EXPECT_EQ(choose_server_greedy(empty, nullptr, 1, pc, 0, 2, pc.servers), 4);
  EXPECT_EQ(choose_server_greedy(empty, nullptr, 1, pc, 0, 9, pc.servers), kNone);

  // Current use counts when nothing initial applies.
  Placement current(sc);
  current.place_demand(0, p012, {2});
  EXPECT_EQ(choose_server_greedy(current, nullptr, 1, sc.net().path(p012), 0, 0, {0, 1, 2}), 2);
}

TEST(LocalSearch, ZeroSweepsLeavesStateUnchanged) {
  const Scenario sc = fixtures::random_tiny(31, true, 3, 3, 3);
  const PlacementState st = run_heuristic(sc, config(Algorithm::FF, 1));
  Placement pl(sc, st);
  Rng rng(4);
  std::vector<int> all;
  for (const Sfc& s : sc.sfcs) all.push_back(s.id);
  const double b = find_new_incumbent(pl, all, rng, 0);
  EXPECT_EQ(pl.state(), st);
  EXPECT_EQ(b, total_cost(st, sc).total);
}

TEST(LocalSearch, NeverWorse) {
  for (int i = 0; i < 40; ++i) {
    const Scenario sc = fixtures::random_tiny(900 + i, i % 2 == 0, 3, 3, 3);
    PlacementState st;
    try {
      st = run_heuristic(sc, config(Algorithm::RF, i));
    } catch (const InfeasibleDemand&) {
      continue;
    }
    const double before = total_cost(st, sc).total;
    Placement pl(sc, st);
    Rng rng(i);
    std::vector<int> all;
    for (const Sfc& s : sc.sfcs) all.push_back(s.id);
    const double after = find_new_incumbent(pl, all, rng, 2);
    EXPECT_LE(after, before);
    EXPECT_TRUE(validate_all(pl.state(), sc).empty());
    EXPECT_EQ(after, total_cost(pl.state(), sc).total);
  }
}

TEST(LocalSearch, MovesToCheaperCloud) {
  // A lone VM costs 0.0184453 + utilization on the edge but 0.0069 in the
  // cloud, and the cloud path stays within the delay bound.
  const Scenario sc = fixtures::build(fixtures::square(), {SfcDef{0, 2, {kVmType}, {10}}});
  const PathId p012 = find_path(sc, 0, {0, 1, 2});
  Placement start(sc);
  start.place_demand(0, p012, {1});
  const double before = total_cost(start).total;
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Placement pl(sc, start.state());
    Rng rng(seed);
    const double b = find_new_incumbent(pl, {0}, rng, 1);
    if (b < before) {
      ++improved;
      EXPECT_EQ(pl.state().servers[0], (std::vector<ServerId>{4}));
      EXPECT_NEAR(b, 0.0069, 1e-12);
    }
  }
  EXPECT_GT(improved, 0);
}
