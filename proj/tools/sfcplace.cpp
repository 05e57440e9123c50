// Command-line driver: experiment runs, scenario files, single placements,
// validation, MILP export/import and the exact solver.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sfcplace/cost.hpp"
#include "sfcplace/error.hpp"
#include "sfcplace/exact.hpp"
#include "sfcplace/harness.hpp"
#include "sfcplace/heuristics.hpp"
#include "sfcplace/lp_export.hpp"
#include "sfcplace/state.hpp"

namespace fs = std::filesystem;
using namespace sfcplace;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// Path of `target` as seen from the directory holding `file`.
std::string relative_to(const std::string& target, const std::string& file) {
  if (file.empty() || file == "-") return target;
  const fs::path dir = fs::absolute(fs::path(file)).parent_path();
  return fs::relative(fs::absolute(target), dir).string();
}

// A placement file names its scenario relative to itself.
struct LoadedState {
  Scenario scenario;
  PlacementState state;
};

LoadedState load_state_file(const std::string& path, const std::string& scenario_override) {
  const std::string text = read_file(path);
  std::string sc_path = scenario_override;
  if (sc_path.empty()) {
    sc_path = placement_scenario_path(text);
    if (sc_path.empty()) throw ParseError(path + " does not name its scenario; pass --scenario");
    if (fs::path(sc_path).is_relative()) {
      sc_path = (fs::path(path).parent_path() / sc_path).string();
    }
  }
  LoadedState out{load_scenario_file(sc_path), {}};
  out.state = load_placement(text, out.scenario);
  return out;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void print_cost(const char* label, const CostBreakdown& c) {
  std::cout << label << " total=" << fmt(c.total) << " edge_opex=" << fmt(c.edge_opex)
            << " cloud_charges=" << fmt(c.cloud_charges) << " penalties=" << fmt(c.penalties)
            << " n_mgr=" << c.n_mgr << " n_rep=" << c.n_rep << '\n';
}

void print_row(const ResultRow& r) {
  std::cout << "phase " << r.phase << ": ";
  if (!r.feasible) {
    std::cout << "infeasible (" << r.diagnostics << ")\n";
    return;
  }
  print_cost("", r.cost);
  if (!r.diagnostics.empty()) std::cout << "  note: " << r.diagnostics << '\n';
}

std::optional<Snapshot> snapshot_from(const std::string& path) {
  if (path.empty()) return std::nullopt;
  const LoadedState ls = load_state_file(path, "");
  return take_snapshot(Placement(ls.scenario, ls.state));
}

struct CatalogFlags {
  int k_edge = 3;
  int k_sync = 2;
  bool no_cloud_path = false;

  void add(CLI::App* app) {
    app->add_option("--k-edge", k_edge, "edge-only candidate paths per SFC")->check(CLI::PositiveNumber);
    app->add_option("--k-sync", k_sync, "candidate sync paths per node pair")->check(CLI::PositiveNumber);
    app->add_flag("--no-cloud-path", no_cloud_path, "omit the cloud path from SFC candidates");
  }
  CatalogOptions options() const { return {k_edge, !no_cloud_path, k_sync}; }
};

struct ParamFlags {
  ScenarioParams p;
  bool one_direction = false;

  void add(CLI::App* app) {
    app->add_option("--R", p.initial_selection_prob, "probability a demand joins the initial set")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--rho", p.penalty_fraction, "penalty as a fraction of the chain's cloud price");
    app->add_option("--d-net", p.d_net, "network part of the delay bound, ms");
    app->add_option("--d-dwt", p.d_dwt, "downtime per migrated instance, ms");
    app->add_flag("--one-direction", one_direction, "one SFC per unordered node pair");
  }
  ScenarioParams params() const {
    ScenarioParams out = p;
    out.both_directions = !one_direction;
    return out;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SFC placement with VM and container VNFs"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "two-phase experiment grid");
  std::string topology, out_dir, lengths = "1..10", modes = "vm-only,ct-only,vm-ct", algs = "grd",
                                  seeds = "1..10", scope = "new";
  int sweeps = 1, workers = 0;
  double combo_limit = ExactLimits{}.combination_limit;
  CatalogFlags run_cat;
  ParamFlags run_par;
  run->add_option("--topology", topology, "topology file")->required()->check(CLI::ExistingFile);
  run->add_option("--lengths", lengths, "chain lengths, e.g. 1..10 or 1,3,5");
  run->add_option("--modes", modes, "comma list of vm-only, ct-only, vm-ct");
  run->add_option("--alg", algs, "comma list of ff, rf, grd, exact");
  run->add_option("--seeds", seeds, "master seeds, e.g. 1..10");
  run->add_option("--sweeps", sweeps, "local-search sweeps")->check(CLI::NonNegativeNumber);
  run->add_option("--scope", scope, "local-search scope: new or all")->check(CLI::IsMember({"new", "all"}));
  run->add_option("--combination-limit", combo_limit, "exact search refuses larger instances");
  run->add_option("--workers", workers, "worker threads (default: SFCPLACE_WORKERS or 1)");
  run->add_option("--out", out_dir, "output directory")->required();
  run_cat.add(run);
  run_par.add(run);

  // scenario
  auto* scen = app.add_subcommand("scenario", "generate a scenario file");
  std::string scen_topology, scen_out, scen_mode = "vm-only";
  int scen_length = 1;
  std::uint64_t scen_seed = 1;
  CatalogFlags scen_cat;
  ParamFlags scen_par;
  scen->add_option("--topology", scen_topology, "topology file")->required()->check(CLI::ExistingFile);
  scen->add_option("--length", scen_length, "chain length")->check(CLI::PositiveNumber);
  scen->add_option("--mode", scen_mode, "vm-only, ct-only or vm-ct");
  scen->add_option("--seed", scen_seed, "master seed");
  scen->add_option("--out", scen_out, "scenario file (default stdout)");
  scen_cat.add(scen);
  scen_par.add(scen);

  // place
  auto* place = app.add_subcommand("place", "two-phase placement of one scenario");
  std::string place_scen, place_alg = "grd", place_out;
  std::uint64_t place_seed = 1;
  int place_sweeps = 1;
  place->add_option("--scenario", place_scen, "scenario file")->required()->check(CLI::ExistingFile);
  place->add_option("--alg", place_alg, "ff, rf, grd or exact");
  place->add_option("--seed", place_seed, "master seed");
  place->add_option("--sweeps", place_sweeps, "local-search sweeps")->check(CLI::NonNegativeNumber);
  place->add_option("--out", place_out, "final placement file");

  // validate
  auto* val = app.add_subcommand("validate", "check a placement file against every constraint");
  std::string val_state, val_scen;
  val->add_option("--state", val_state, "placement file")->required()->check(CLI::ExistingFile);
  val->add_option("--scenario", val_scen, "scenario file (default: the one named in the state)");

  // export-milp
  auto* exp = app.add_subcommand("export-milp", "write the MILP of a scenario in LP format");
  std::string exp_scen, exp_snap, exp_out;
  bool exp_initial = false;
  exp->add_option("--scenario", exp_scen, "scenario file")->required()->check(CLI::ExistingFile);
  exp->add_option("--snapshot", exp_snap, "placement file whose instances form the snapshot");
  exp->add_flag("--initial", exp_initial, "export only the initial demand set");
  exp->add_option("--out", exp_out, "LP file (default stdout)");

  // import
  auto* imp = app.add_subcommand("import", "rebuild a placement from solver output");
  std::string imp_scen, imp_sol, imp_snap, imp_out;
  bool imp_initial = false;
  imp->add_option("--scenario", imp_scen, "scenario file")->required()->check(CLI::ExistingFile);
  imp->add_option("--solution", imp_sol, "`name value` lines")->required()->check(CLI::ExistingFile);
  imp->add_option("--snapshot", imp_snap, "placement file whose instances form the snapshot");
  imp->add_flag("--initial", imp_initial, "the solution covers only the initial demand set");
  imp->add_option("--out", imp_out, "placement file");

  // oracle
  auto* orc = app.add_subcommand("oracle", "exact branch and bound on a small scenario");
  std::string orc_scen, orc_snap, orc_out, orc_sol;
  bool orc_initial = false;
  long long orc_budget = ExactLimits{}.node_budget;
  double orc_limit = ExactLimits{}.combination_limit;
  orc->add_option("--scenario", orc_scen, "scenario file")->required()->check(CLI::ExistingFile);
  orc->add_option("--snapshot", orc_snap, "placement file whose instances form the snapshot");
  orc->add_flag("--initial", orc_initial, "solve only the initial demand set");
  orc->add_option("--node-budget", orc_budget, "search nodes before giving up");
  orc->add_option("--combination-limit", orc_limit, "refuse larger instances");
  orc->add_option("--out", orc_out, "best placement file");
  orc->add_option("--solution-out", orc_sol, "best placement as LP variable values");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentPlan plan;
      plan.topology = topology;
      plan.catalog = run_cat.options();
      plan.chain_lengths = parse_int_list(lengths);
      std::stringstream ms(modes);
      for (std::string m; std::getline(ms, m, ',');) plan.modes.push_back(parse_chain_mode(m));
      std::stringstream as(algs);
      for (std::string a; std::getline(as, a, ',');) plan.algorithms.push_back(a);
      plan.seeds = parse_seed_list(seeds);
      plan.base = run_par.params();
      plan.sweeps = sweeps;
      plan.scope = scope == "all" ? SearchScope::All : SearchScope::NewDemands;
      plan.exact_limits.combination_limit = combo_limit;
      plan.workers = workers;
      const auto rows = run_plan(plan);
      write_report(rows, out_dir);
      int failed = 0;
      for (const auto& r : rows) failed += r.feasible ? 0 : 1;
      std::cout << rows.size() << " rows written to " << out_dir << " (" << failed
                << " infeasible)\n";
      return 0;
    }

    if (*scen) {
      auto net = std::make_shared<const NetworkModel>(load_topology_file(scen_topology, scen_cat.options()));
      Scenario sc = make_scenario(net, scen_par.params(), scen_length, parse_chain_mode(scen_mode), scen_seed);
      sc.topology_path = relative_to(scen_topology, scen_out);
      write_output(scen_out, dump_scenario(sc));
      return 0;
    }

    if (*place) {
      const Scenario sc = load_scenario_file(place_scen);
      RunOptions opts;
      opts.sweeps = place_sweeps;
      const TwoPhaseResult r = run_two_phase(sc, place_alg, place_seed, opts);
      print_row(r.phase1);
      print_row(r.phase2);
      if (!place_out.empty() && r.state2) {
        write_output(place_out, dump_placement(*r.state2, relative_to(place_scen, place_out)));
      }
      return r.phase2.feasible ? 0 : 2;
    }

    if (*val) {
      const LoadedState ls = load_state_file(val_state, val_scen);
      const Violations v = validate_all(ls.state, ls.scenario);
      for (const auto& x : v) std::cout << describe(x) << '\n';
      if (!v.empty()) {
        std::cout << v.size() << " violation(s)\n";
        return 1;
      }
      print_cost("valid:", total_cost(Placement(ls.scenario, ls.state)));
      return 0;
    }

    if (*exp) {
      Scenario sc = load_scenario_file(exp_scen);
      if (exp_initial) sc = initial_instance(sc);
      write_output(exp_out, export_milp(sc, snapshot_from(exp_snap)));
      return 0;
    }

    if (*imp) {
      Scenario sc = load_scenario_file(imp_scen);
      if (imp_initial) sc = initial_instance(sc);
      const auto snap = snapshot_from(imp_snap);
      const PlacementState st = import_solution(read_file(imp_sol), sc, snap);
      const Violations v = validate_all(st, sc);
      for (const auto& x : v) std::cout << describe(x) << '\n';
      if (!v.empty()) return 1;
      print_cost("imported:", total_cost(Placement(sc, st)));
      if (!imp_out.empty()) write_output(imp_out, dump_placement(st, relative_to(imp_scen, imp_out)));
      return 0;
    }

    if (*orc) {
      Scenario sc = load_scenario_file(orc_scen);
      if (orc_initial) sc = initial_instance(sc);
      ExactLimits limits;
      limits.node_budget = orc_budget;
      limits.combination_limit = orc_limit;
      const auto snap = snapshot_from(orc_snap);
      const ExactResult r = solve_exact(sc, snap, limits);
      const char* status = r.status == ExactStatus::Optimal ? "optimal"
                           : r.status == ExactStatus::Infeasible ? "infeasible"
                                                                 : "budget exhausted";
      std::cout << "status: " << status << ", nodes: " << r.nodes_explored << '\n';
      if (!r.has_solution) return 2;
      print_cost("best:", r.best_cost);
      Placement pl(sc, r.best_state);
      if (snap) pl.set_snapshot(snap);
      if (!orc_out.empty()) write_output(orc_out, dump_placement(pl.state(), relative_to(orc_scen, orc_out)));
      if (!orc_sol.empty()) write_output(orc_sol, write_solution(pl.state(), sc));
      return 0;
    }
  } catch (const GuardError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
