#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "sfcplace/error.hpp"
#include "sfcplace/rng.hpp"
#include "sfcplace/workload.hpp"

using namespace sfcplace;

namespace {

std::shared_ptr<const NetworkModel> load(const char* name) {
  return std::make_shared<const NetworkModel>(
      load_topology_file(std::string(SFCPLACE_DATA_DIR) + "/" + name));
}

Scenario make(int length, ChainMode mode, std::uint64_t seed, double r = 0.3) {
  ScenarioParams p;
  p.chain_length = length;
  p.mode = mode;
  p.seed = seed;
  p.initial_selection_prob = r;
  Scenario sc = generate_scenario(load("net7.topo"), p);
  select_initial_demands(sc, seed + 1000);
  return sc;
}

}  // namespace

TEST(VnfCatalog, TableValues) {
  const auto cat = default_vnf_catalog();
  ASSERT_EQ(cat.size(), 2u);
  const VnfType& vm = cat[kVmType];
  const VnfType& ct = cat[kCtType];
  EXPECT_EQ(vm.exec_mode, ExecMode::VM);
  EXPECT_EQ(vm.overhead, 7);
  EXPECT_EQ(vm.load_ratio, 1.2);
  EXPECT_EQ(vm.sync_ratio, 0.1);
  EXPECT_EQ(vm.proc_capacity_max, 72);
  EXPECT_EQ(vm.delay_queue, 3);
  EXPECT_EQ(vm.delay_proc_slope, 5);
  EXPECT_EQ(vm.delay_proc_min, 2);
  EXPECT_EQ(vm.delay_proc_max, 10);
  EXPECT_EQ(vm.cloud_price, 0.0069);
  EXPECT_EQ(ct.exec_mode, ExecMode::CT);
  EXPECT_EQ(ct.overhead, 0);
  EXPECT_EQ(ct.cloud_price, 0.1199988);
  EXPECT_EQ(ct.load_ratio, vm.load_ratio);
  EXPECT_EQ(ct.delay_proc_max, vm.delay_proc_max);
}

TEST(GenerateScenario, ShapeOnNet7) {
  const Scenario sc = make(3, ChainMode::VmCt, 11);
  EXPECT_EQ(sc.sfcs.size(), 30u);  // 6 edge nodes, ordered pairs
  std::set<std::pair<int, int>> pairs;
  for (const Sfc& s : sc.sfcs) {
    EXPECT_EQ(s.length(), 3);
    EXPECT_GE(s.demands.size(), 1u);
    EXPECT_LE(s.demands.size(), 3u);
    EXPECT_FALSE(sc.net().node(s.src).is_cloud);
    EXPECT_FALSE(sc.net().node(s.dst).is_cloud);
    pairs.insert({s.src, s.dst});
    for (int d : s.demands) {
      const double bw = sc.demands[d].bandwidth;
      EXPECT_GE(bw, 1);
      EXPECT_LE(bw, 20);
      EXPECT_EQ(bw, std::floor(bw));
      EXPECT_EQ(sc.demands[d].sfc, s.id);
    }
    EXPECT_EQ(s.admissible_paths, sc.net().sfc_paths(s.src, s.dst));
  }
  EXPECT_EQ(pairs.size(), 30u);
}

TEST(GenerateScenario, OneDirectionHalvesTheSfcs) {
  ScenarioParams p;
  p.both_directions = false;
  const Scenario sc = generate_scenario(load("net7.topo"), p);
  EXPECT_EQ(sc.sfcs.size(), 15u);
}

TEST(GenerateScenario, DerivedBoundsForTwoVms) {
  const Scenario sc = make(2, ChainMode::VmOnly, 3);
  for (const Sfc& s : sc.sfcs) {
    EXPECT_NEAR(s.d_max, 25.0, 1e-12);
    EXPECT_NEAR(s.d_hat_max, 80.0, 1e-12);
    EXPECT_NEAR(s.penalty_rate, 0.00138, 1e-12);
  }
}

TEST(GenerateScenario, BoundInvariants) {
  for (auto mode : {ChainMode::VmOnly, ChainMode::CtOnly, ChainMode::VmCt}) {
    for (int len = 1; len <= 10; ++len) {
      const Scenario sc = make(len, mode, 5);
      for (const Sfc& s : sc.sfcs) {
        EXPECT_EQ(s.d_hat_max - s.d_max, len * sc.params.d_dwt);
        for (int v = 0; v < s.length(); ++v) {
          const VnfType& t = sc.vnf(s.id, v);
          if (mode == ChainMode::VmOnly) {
            EXPECT_EQ(t.overhead, 7);
          }
          if (mode == ChainMode::CtOnly) {
            EXPECT_EQ(t.overhead, 0);
          }
        }
      }
    }
  }
}

TEST(GenerateScenario, Deterministic) {
  EXPECT_EQ(dump_scenario(make(4, ChainMode::VmCt, 9)), dump_scenario(make(4, ChainMode::VmCt, 9)));
  EXPECT_NE(dump_scenario(make(4, ChainMode::VmCt, 9)), dump_scenario(make(4, ChainMode::VmCt, 10)));
}

TEST(GenerateScenario, WorkloadSharedAcrossModesAndLengths) {
  const Scenario a = make(2, ChainMode::VmOnly, 21);
  const Scenario b = make(7, ChainMode::CtOnly, 21);
  ASSERT_EQ(a.demands.size(), b.demands.size());
  for (std::size_t i = 0; i < a.demands.size(); ++i) {
    EXPECT_EQ(a.demands[i].bandwidth, b.demands[i].bandwidth);
    EXPECT_EQ(a.demands[i].in_initial_set, b.demands[i].in_initial_set);
  }
}

TEST(GenerateScenario, MixedModeUsesBothFlavors) {
  const Scenario sc = make(10, ChainMode::VmCt, 2);
  int vm = 0, ct = 0;
  for (const Sfc& s : sc.sfcs) {
    for (int t : s.vnf_chain) (t == kVmType ? vm : ct)++;
  }
  EXPECT_GT(vm, 100);
  EXPECT_GT(ct, 100);
}

TEST(GenerateScenario, RejectsZeroLength) {
  ScenarioParams p;
  p.chain_length = 0;
  EXPECT_THROW(generate_scenario(load("net7.topo"), p), ModelError);
}

TEST(SelectInitial, AllWhenROne) {
  const Scenario sc = make(1, ChainMode::VmOnly, 4, 1.0);
  for (const TrafficDemand& d : sc.demands) EXPECT_TRUE(d.in_initial_set);
}

TEST(SelectInitial, ExactlyOneWhenRZero) {
  const Scenario sc = make(1, ChainMode::VmOnly, 4, 0.0);
  for (const Sfc& s : sc.sfcs) EXPECT_EQ(initial_demands(sc, s.id).size(), 1u);
}

TEST(SelectInitial, PartitionInvariants) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scenario sc = make(1, ChainMode::VmOnly, seed);
    const Scenario first = initial_instance(sc);
    for (const Sfc& s : sc.sfcs) {
      const auto a = initial_demands(sc, s.id);
      const auto b = later_demands(sc, s.id);
      EXPECT_FALSE(a.empty());
      std::set<int> all(a.begin(), a.end());
      for (int d : b) EXPECT_TRUE(all.insert(d).second);
      EXPECT_EQ(all, std::set<int>(s.demands.begin(), s.demands.end()));
      EXPECT_EQ(first.sfcs[s.id].demands, a);
    }
  }
}

TEST(SelectInitial, BinomialConcentration) {
  // Pool demands of net44 workloads until there are at least 10 000. With n
  // demands in an SFC, the expected number of initial ones including the
  // single fallback pick is nR + (1-R)^n.
  const double r = 0.3;
  auto net = load("net44.topo");
  long total = 0;
  double selected = 0.0, expected = 0.0;
  for (std::uint64_t seed = 1; total < 10000; ++seed) {
    ScenarioParams p;
    p.seed = seed;
    p.initial_selection_prob = r;
    Scenario sc = generate_scenario(net, p);
    select_initial_demands(sc, Rng::derive(seed, "partition"));
    for (const Sfc& s : sc.sfcs) {
      const int n = static_cast<int>(s.demands.size());
      total += n;
      selected += static_cast<double>(initial_demands(sc, s.id).size());
      expected += n * r + std::pow(1.0 - r, n);
    }
  }
  EXPECT_NEAR(selected / total, expected / total, 0.02);
}

TEST(ScenarioFile, RoundTripIsBitExact) {
  Scenario sc = make(3, ChainMode::VmCt, 13);
  sc.topology_path = "net7.topo";
  const std::string text = dump_scenario(sc);
  const Scenario back = load_scenario(text, SFCPLACE_DATA_DIR);
  EXPECT_EQ(dump_scenario(back), text);
}

TEST(ScenarioFile, RegeneratesWithoutSfcs) {
  const std::string text = R"({"format": "sfcplace-scenario/1", "topology": "net7.topo",
    "params": {"seed": 5, "mode": "ct-only", "chain_length": 2}})";
  const Scenario sc = load_scenario(text, SFCPLACE_DATA_DIR);
  EXPECT_EQ(sc.sfcs.size(), 30u);
  for (const Sfc& s : sc.sfcs) EXPECT_EQ(s.vnf_chain, (std::vector<int>{kCtType, kCtType}));
  EXPECT_EQ(dump_scenario(sc), dump_scenario(load_scenario(text, SFCPLACE_DATA_DIR)));
}

TEST(ScenarioFile, Errors) {
  EXPECT_THROW(load_scenario("{", SFCPLACE_DATA_DIR), ParseError);
  EXPECT_THROW(load_scenario(R"({"topology": "net7.topo", "params": {"mode": "gpu"}})", SFCPLACE_DATA_DIR),
               ParseError);
  EXPECT_THROW(parse_chain_mode("both"), ParseError);
}
