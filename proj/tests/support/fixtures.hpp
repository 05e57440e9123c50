#pragma once

// Small hand-made networks and scenarios shared by the tests.

#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "sfcplace/rng.hpp"
#include "sfcplace/topology.hpp"
#include "sfcplace/workload.hpp"

namespace fixtures {

using namespace sfcplace;

// Four edge nodes in a square, cloud node 4 behind nodes 1 and 3.
//
//   0 --1ms-- 1 --1ms-- 2
//   |         \        |
//  1.5ms      cloud   1.5ms
//   |         /        |
//   +-- 3 ---+---------+
inline std::string square_topology(double server_cap = 1000, double link_cap = 500) {
  std::ostringstream os;
  os << "[nodes]\n0 - - 0 a\n1 - - 0 b\n2 - - 0 c\n3 - - 0 d\n4 - - 1 cloud\n";
  os << "[servers]\n";
  for (int n = 0; n < 4; ++n) os << n << " " << n << " " << server_cap << " 0 0.0184453 0.0095632 0\n";
  os << "4 4 1e9 1 0 0 0\n";
  os << "[links]\n";
  const int pairs[4][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  const double delay[4] = {1.0, 1.0, 1.5, 1.5};
  for (int i = 0; i < 4; ++i) {
    os << pairs[i][0] << " " << pairs[i][1] << " " << link_cap << " " << delay[i] << "\n";
    os << pairs[i][1] << " " << pairs[i][0] << " " << link_cap << " " << delay[i] << "\n";
  }
  for (int g : {1, 3}) {
    os << g << " 4 inf 4\n4 " << g << " inf 4\n";
  }
  return os.str();
}

inline std::shared_ptr<const NetworkModel> network(const std::string& text,
                                                   const CatalogOptions& opts = {2, true, 2}) {
  std::istringstream in(text);
  return std::make_shared<const NetworkModel>(load_topology(in, opts));
}

inline std::shared_ptr<const NetworkModel> square(double server_cap = 1000, double link_cap = 500,
                                                  const CatalogOptions& opts = {2, true, 2}) {
  return network(square_topology(server_cap, link_cap), opts);
}

struct SfcDef {
  NodeId src;
  NodeId dst;
  std::vector<int> types;          // kVmType / kCtType per chain position
  std::vector<double> bandwidths;  // one demand each
  std::vector<bool> initial = {};  // default: all initial
};

inline Scenario build(std::shared_ptr<const NetworkModel> net, const std::vector<SfcDef>& defs,
                      ScenarioParams params = {}) {
  Scenario sc;
  sc.network = std::move(net);
  sc.vnf_catalog = default_vnf_catalog();
  sc.params = params;
  for (const SfcDef& def : defs) {
    Sfc s;
    s.id = static_cast<int>(sc.sfcs.size());
    s.src = def.src;
    s.dst = def.dst;
    s.vnf_chain = def.types;
    for (std::size_t i = 0; i < def.bandwidths.size(); ++i) {
      TrafficDemand d;
      d.id = static_cast<int>(sc.demands.size());
      d.sfc = s.id;
      d.bandwidth = def.bandwidths[i];
      d.in_initial_set = def.initial.empty() ? true : def.initial[i];
      sc.demands.push_back(d);
      s.demands.push_back(d.id);
    }
    sc.sfcs.push_back(std::move(s));
  }
  params.chain_length = defs.empty() ? 1 : static_cast<int>(defs.front().types.size());
  sc.params.chain_length = params.chain_length;
  derive_sfc_fields(sc);
  return sc;
}

// Random instance on the square. `ample` keeps edge capacity far from binding.
inline Scenario random_tiny(std::uint64_t seed, bool ample, int max_sfcs = 2, int max_len = 2,
                            int max_demands = 2) {
  Rng rng = Rng::stream(seed, "tiny");
  const double cap = ample ? 1000 : 40 + rng.uniform_int(0, 30);
  const double link = ample ? 500 : 25 + rng.uniform_int(0, 20);
  auto net = square(cap, link);
  std::vector<SfcDef> defs;
  const int n_sfc = rng.uniform_int(1, max_sfcs);
  for (int i = 0; i < n_sfc; ++i) {
    SfcDef s;
    s.src = rng.uniform_int(0, 3);
    do {
      s.dst = rng.uniform_int(0, 3);
    } while (s.dst == s.src);
    const int len = rng.uniform_int(1, max_len);
    for (int v = 0; v < len; ++v) s.types.push_back(rng.bernoulli(0.5) ? kCtType : kVmType);
    const int nd = rng.uniform_int(1, max_demands);
    for (int k = 0; k < nd; ++k) s.bandwidths.push_back(rng.uniform_int(1, 20));
    defs.push_back(s);
  }
  return build(net, defs);
}

}  // namespace fixtures
