#include "sfcplace/workload.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sfcplace/error.hpp"
#include "sfcplace/rng.hpp"

namespace sfcplace {

using nlohmann::json;

std::string to_string(ChainMode mode) {
  switch (mode) {
    case ChainMode::VmOnly: return "vm-only";
    case ChainMode::CtOnly: return "ct-only";
    case ChainMode::VmCt: return "vm-ct";
  }
  return "?";
}

ChainMode parse_chain_mode(const std::string& text) {
  if (text == "vm-only") return ChainMode::VmOnly;
  if (text == "ct-only") return ChainMode::CtOnly;
  if (text == "vm-ct") return ChainMode::VmCt;
  throw ParseError("unknown mode '" + text + "' (expected vm-only, ct-only or vm-ct)");
}

int Scenario::active_demand_count() const {
  int n = 0;
  for (const Sfc& s : sfcs) n += static_cast<int>(s.demands.size());
  return n;
}

std::vector<VnfType> default_vnf_catalog() {
  VnfType vm;
  vm.name = "VM";
  vm.exec_mode = ExecMode::VM;
  vm.overhead = 7;
  vm.load_ratio = 1.2;
  vm.sync_ratio = 0.1;
  vm.proc_capacity_max = 72;
  vm.delay_queue = 3;
  vm.delay_proc_slope = 5;
  vm.delay_proc_min = 2;
  vm.delay_proc_max = 10;
  vm.cloud_price = 0.0069;
  vm.replicable = true;

  VnfType ct = vm;
  ct.name = "CT";
  ct.exec_mode = ExecMode::CT;
  ct.overhead = 0;
  ct.cloud_price = 0.1199988;
  return {vm, ct};
}

void derive_sfc_fields(Scenario& scenario) {
  const auto& p = scenario.params;
  for (Sfc& s : scenario.sfcs) {
    if (s.vnf_chain.empty()) throw ModelError("SFC " + std::to_string(s.id) + " has an empty chain");
    double proc_max = 0.0;
    double price = 0.0;
    for (int t : s.vnf_chain) {
      const VnfType& type = scenario.vnf_catalog.at(t);
      if (type.delay_proc_min > type.delay_proc_max) {
        throw ModelError("VNF type " + type.name + " has min delay above max delay");
      }
      proc_max += type.delay_proc_max;
      price += type.cloud_price;
    }
    s.d_max = proc_max + p.d_net;
    s.d_hat_max = s.d_max + static_cast<double>(s.vnf_chain.size()) * p.d_dwt;
    s.penalty_rate = p.penalty_fraction * price;
    if (scenario.network) s.admissible_paths = scenario.network->sfc_paths(s.src, s.dst);
  }
}

Scenario generate_scenario(std::shared_ptr<const NetworkModel> network,
                           const ScenarioParams& params) {
  if (params.chain_length < 1) throw ModelError("chain length must be at least 1");
  if (params.initial_selection_prob < 0.0 || params.initial_selection_prob > 1.0) {
    throw ModelError("initial selection probability must lie in [0, 1]");
  }
  Scenario sc;
  sc.network = std::move(network);
  sc.vnf_catalog = default_vnf_catalog();
  sc.params = params;

  const auto edge = sc.network->edge_nodes();
  for (NodeId a : edge) {
    for (NodeId b : edge) {
      if (a == b) continue;
      if (!params.both_directions && a > b) continue;
      Sfc s;
      s.id = static_cast<int>(sc.sfcs.size());
      s.src = a;
      s.dst = b;
      // Demands and flavors come from separate substreams so the workload is
      // identical across modes and chain lengths for one seed.
      Rng demand_rng = Rng::stream(params.seed, "demands", s.id);
      const int count = demand_rng.uniform_int(1, 3);
      for (int i = 0; i < count; ++i) {
        TrafficDemand d;
        d.id = static_cast<int>(sc.demands.size());
        d.sfc = s.id;
        d.bandwidth = demand_rng.uniform_int(1, 20);
        sc.demands.push_back(d);
        s.demands.push_back(d.id);
      }
      Rng mode_rng = Rng::stream(params.seed, "flavors", s.id);
      for (int v = 0; v < params.chain_length; ++v) {
        switch (params.mode) {
          case ChainMode::VmOnly: s.vnf_chain.push_back(kVmType); break;
          case ChainMode::CtOnly: s.vnf_chain.push_back(kCtType); break;
          case ChainMode::VmCt: s.vnf_chain.push_back(mode_rng.bernoulli(0.5) ? kCtType : kVmType); break;
        }
      }
      sc.sfcs.push_back(std::move(s));
    }
  }
  derive_sfc_fields(sc);
  return sc;
}

void select_initial_demands(Scenario& scenario, std::uint64_t seed) {
  const double r = scenario.params.initial_selection_prob;
  for (const Sfc& s : scenario.sfcs) {
    Rng rng = Rng::stream(seed, "initial", s.id);
    bool any = false;
    for (int d : s.demands) {
      const bool pick = rng.bernoulli(r);
      scenario.demands[d].in_initial_set = pick;
      any = any || pick;
    }
    if (!any && !s.demands.empty()) {
      scenario.demands[rng.pick(s.demands)].in_initial_set = true;
    }
  }
}

std::vector<int> initial_demands(const Scenario& scenario, int sfc) {
  std::vector<int> out;
  for (int d : scenario.sfcs[sfc].demands) {
    if (scenario.demands[d].in_initial_set) out.push_back(d);
  }
  return out;
}

std::vector<int> later_demands(const Scenario& scenario, int sfc) {
  std::vector<int> out;
  for (int d : scenario.sfcs[sfc].demands) {
    if (!scenario.demands[d].in_initial_set) out.push_back(d);
  }
  return out;
}

Scenario initial_instance(const Scenario& scenario) {
  Scenario out = scenario;
  for (Sfc& s : out.sfcs) s.demands = initial_demands(scenario, s.id);
  return out;
}

namespace {

json vnf_to_json(const VnfType& t) {
  return json{{"name", t.name},
              {"exec_mode", t.exec_mode == ExecMode::VM ? "VM" : "CT"},
              {"overhead", t.overhead},
              {"load_ratio", t.load_ratio},
              {"sync_ratio", t.sync_ratio},
              {"proc_capacity_max", t.proc_capacity_max},
              {"delay_queue", t.delay_queue},
              {"delay_proc_slope", t.delay_proc_slope},
              {"delay_proc_min", t.delay_proc_min},
              {"delay_proc_max", t.delay_proc_max},
              {"cloud_price", t.cloud_price},
              {"replicable", t.replicable}};
}

VnfType vnf_from_json(const json& j) {
  VnfType t;
  t.name = j.at("name").get<std::string>();
  const auto mode = j.at("exec_mode").get<std::string>();
  if (mode != "VM" && mode != "CT") throw ParseError("exec_mode must be VM or CT");
  t.exec_mode = mode == "VM" ? ExecMode::VM : ExecMode::CT;
  t.overhead = j.at("overhead").get<double>();
  t.load_ratio = j.at("load_ratio").get<double>();
  t.sync_ratio = j.at("sync_ratio").get<double>();
  t.proc_capacity_max = j.at("proc_capacity_max").get<double>();
  t.delay_queue = j.at("delay_queue").get<double>();
  t.delay_proc_slope = j.at("delay_proc_slope").get<double>();
  t.delay_proc_min = j.at("delay_proc_min").get<double>();
  t.delay_proc_max = j.at("delay_proc_max").get<double>();
  t.cloud_price = j.at("cloud_price").get<double>();
  t.replicable = j.value("replicable", true);
  if (t.overhead < 0) throw ModelError("VNF type " + t.name + " has negative overhead");
  if (t.exec_mode == ExecMode::CT && t.overhead != 0) {
    throw ModelError("CT VNF type " + t.name + " must have zero overhead");
  }
  return t;
}

}  // namespace

std::string dump_scenario(const Scenario& sc) {
  const auto& p = sc.params;
  json j;
  j["format"] = "sfcplace-scenario/1";
  j["topology"] = sc.topology_path;
  if (sc.network) {
    const auto& o = sc.network->catalog().options;
    j["catalog"] = {{"k_edge", o.k_edge}, {"cloud_path", o.include_cloud_path}, {"k_sync", o.k_sync}};
  }
  j["params"] = {{"seed", p.seed},
                 {"mode", to_string(p.mode)},
                 {"chain_length", p.chain_length},
                 {"R", p.initial_selection_prob},
                 {"d_net", p.d_net},
                 {"d_dwt", p.d_dwt},
                 {"penalty_fraction", p.penalty_fraction},
                 {"both_directions", p.both_directions}};
  json types = json::array();
  for (const auto& t : sc.vnf_catalog) types.push_back(vnf_to_json(t));
  j["vnf_types"] = types;
  json sfcs = json::array();
  for (const Sfc& s : sc.sfcs) {
    json chain = json::array();
    for (int t : s.vnf_chain) chain.push_back(sc.vnf_catalog[t].name);
    sfcs.push_back({{"id", s.id}, {"src", s.src}, {"dst", s.dst}, {"chain", chain}, {"demands", s.demands}});
  }
  j["sfcs"] = sfcs;
  json demands = json::array();
  for (const TrafficDemand& d : sc.demands) {
    demands.push_back({{"id", d.id}, {"sfc", d.sfc}, {"bandwidth", d.bandwidth}, {"initial", d.in_initial_set}});
  }
  j["demands"] = demands;
  return j.dump(1) + "\n";
}

Scenario load_scenario(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    ScenarioParams p;
    const json& jp = j.at("params");
    p.seed = jp.value("seed", std::uint64_t{1});
    p.mode = parse_chain_mode(jp.value("mode", std::string("vm-only")));
    p.chain_length = jp.value("chain_length", 1);
    p.initial_selection_prob = jp.value("R", 0.3);
    p.d_net = jp.value("d_net", 5.0);
    p.d_dwt = jp.value("d_dwt", 27.5);
    p.penalty_fraction = jp.value("penalty_fraction", 0.1);
    p.both_directions = jp.value("both_directions", true);

    CatalogOptions opts;
    if (j.contains("catalog")) {
      opts.k_edge = j["catalog"].value("k_edge", opts.k_edge);
      opts.include_cloud_path = j["catalog"].value("cloud_path", opts.include_cloud_path);
      opts.k_sync = j["catalog"].value("k_sync", opts.k_sync);
    }
    const std::string topo = j.at("topology").get<std::string>();
    std::filesystem::path tp(topo);
    if (tp.is_relative()) tp = std::filesystem::path(base_dir) / tp;
    auto net = std::make_shared<const NetworkModel>(load_topology_file(tp.string(), opts));

    Scenario sc;
    if (!j.contains("sfcs")) {
      sc = generate_scenario(net, p);
      select_initial_demands(sc, Rng::derive(p.seed, "partition"));
    } else {
      sc.network = net;
      sc.params = p;
      sc.vnf_catalog = j.contains("vnf_types") ? std::vector<VnfType>{} : default_vnf_catalog();
      if (j.contains("vnf_types")) {
        for (const auto& t : j["vnf_types"]) sc.vnf_catalog.push_back(vnf_from_json(t));
      }
      auto type_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < sc.vnf_catalog.size(); ++i) {
          if (sc.vnf_catalog[i].name == name) return static_cast<int>(i);
        }
        throw ParseError("unknown VNF type '" + name + "'");
      };
      for (const auto& js : j["sfcs"]) {
        Sfc s;
        s.id = js.at("id").get<int>();
        if (s.id != static_cast<int>(sc.sfcs.size())) throw ParseError("SFC ids must be contiguous from 0");
        s.src = js.at("src").get<int>();
        s.dst = js.at("dst").get<int>();
        for (const auto& t : js.at("chain")) s.vnf_chain.push_back(type_index(t.get<std::string>()));
        if (js.contains("demands")) s.demands = js["demands"].get<std::vector<int>>();
        sc.sfcs.push_back(std::move(s));
      }
      const bool explicit_lists = !j["sfcs"].empty() && j["sfcs"][0].contains("demands");
      for (const auto& jd : j.at("demands")) {
        TrafficDemand d;
        d.id = jd.at("id").get<int>();
        if (d.id != static_cast<int>(sc.demands.size())) throw ParseError("demand ids must be contiguous from 0");
        d.sfc = jd.at("sfc").get<int>();
        d.bandwidth = jd.at("bandwidth").get<double>();
        d.in_initial_set = jd.value("initial", true);
        if (!(d.bandwidth > 0)) throw ModelError("demand " + std::to_string(d.id) + " has non-positive bandwidth");
        if (d.sfc < 0 || d.sfc >= static_cast<int>(sc.sfcs.size())) {
          throw ModelError("demand " + std::to_string(d.id) + " references unknown SFC");
        }
        if (!explicit_lists) sc.sfcs[d.sfc].demands.push_back(d.id);
        sc.demands.push_back(d);
      }
      derive_sfc_fields(sc);
    }
    sc.topology_path = topo;
    return sc;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed scenario: ") + e.what());
  }
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return load_scenario(ss.str(), dir.empty() ? "." : dir.string());
}

}  // namespace sfcplace
