#include "sfcplace/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "sfcplace/error.hpp"
#include "sfcplace/rng.hpp"

namespace sfcplace {

SeedPolicy SeedPolicy::from_master(std::uint64_t master) {
  SeedPolicy p;
  p.scenario = Rng::derive(master, "scenario");
  p.partition = Rng::derive(p.scenario, "partition");
  p.algorithm = Rng::derive(master, "algorithm");
  return p;
}

Scenario make_scenario(std::shared_ptr<const NetworkModel> network, const ScenarioParams& base,
                       int chain_length, ChainMode mode, std::uint64_t master_seed) {
  const SeedPolicy seeds = SeedPolicy::from_master(master_seed);
  ScenarioParams p = base;
  p.chain_length = chain_length;
  p.mode = mode;
  p.seed = seeds.scenario;
  Scenario sc = generate_scenario(std::move(network), p);
  select_initial_demands(sc, seeds.partition);
  return sc;
}

void fill_metrics(ResultRow& row, const Placement& placement) {
  row.cost = total_cost(placement);
  row.avg_link_util = average_link_utilization(placement);
  row.avg_server_util = average_server_utilization(placement);
  row.avg_service_delay = average_service_delay(placement);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// One phase: place, validate, measure. Returns the state when feasible.
std::optional<PlacementState> run_phase(const Scenario& sc, const std::string& algorithm,
                                        std::uint64_t seed, const RunOptions& options,
                                        const PlacementState* initial, ResultRow& row) {
  const auto t0 = Clock::now();
  std::optional<PlacementState> state;
  try {
    if (algorithm == "exact") {
      std::optional<Snapshot> snap;
      if (initial) snap = take_snapshot(Placement(sc, *initial));
      ExactResult r = solve_exact(sc, snap, options.exact_limits);
      if (!r.has_solution) {
        row.diagnostics = r.status == ExactStatus::Infeasible ? "exact search: instance infeasible"
                                                                : "exact search: node budget exhausted";
      } else {
        if (!r.proven_optimal) row.diagnostics = "exact search: node budget exhausted, best found reported";
        state = std::move(r.best_state);
      }
    } else {
      HeuristicConfig cfg;
      cfg.algorithm = parse_algorithm(algorithm);
      cfg.seed = seed;
      cfg.local_search_sweeps = options.sweeps;
      cfg.scope = options.scope;
      cfg.single_path_per_sfc = initial == nullptr;
      state = run_heuristic(sc, cfg, initial);
    }
  } catch (const InfeasibleDemand& e) {
    row.diagnostics = e.what();
  } catch (const GuardError& e) {
    row.diagnostics = std::string("refused: ") + e.what();
  }
  if (state) {
    const Violations v = validate_all(*state, sc);
    if (!v.empty()) {
      row.diagnostics = "internal error, placement violates " + describe(v.front());
      state.reset();
    } else {
      fill_metrics(row, Placement(sc, *state));
      row.feasible = true;
    }
  }
  row.runtime_s = seconds_since(t0);
  return state;
}

}  // namespace

TwoPhaseResult run_two_phase(const Scenario& scenario, const std::string& algorithm,
                             std::uint64_t master_seed, const RunOptions& options) {
  if (algorithm != "exact") parse_algorithm(algorithm);
  const SeedPolicy seeds = SeedPolicy::from_master(master_seed);
  TwoPhaseResult out;
  for (ResultRow* r : {&out.phase1, &out.phase2}) {
    r->chain_length = scenario.params.chain_length;
    r->mode = scenario.params.mode;
    r->algorithm = algorithm;
    r->seed = master_seed;
  }
  out.phase1.phase = 1;
  out.phase2.phase = 2;

  const Scenario initial = initial_instance(scenario);
  out.state1 = run_phase(initial, algorithm, Rng::derive(seeds.algorithm, "phase-1"), options,
                         nullptr, out.phase1);
  if (!out.state1) {
    out.phase2.diagnostics = "skipped: initial placement failed";
    return out;
  }
  out.state2 = run_phase(scenario, algorithm, Rng::derive(seeds.algorithm, "phase-2"), options,
                         &*out.state1, out.phase2);
  return out;
}

std::vector<ResultRow> run_plan(const ExperimentPlan& plan) {
  if (plan.chain_lengths.empty() || plan.modes.empty() || plan.algorithms.empty() ||
      plan.seeds.empty()) {
    throw ModelError("experiment plan needs at least one length, mode, algorithm and seed");
  }
  for (int len : plan.chain_lengths) {
    if (len < 1) throw ModelError("chain lengths must be >= 1");
  }
  for (const auto& a : plan.algorithms) {
    if (a != "exact") parse_algorithm(a);
  }
  auto net = std::make_shared<const NetworkModel>(load_topology_file(plan.topology, plan.catalog));

  struct Cell {
    int length;
    ChainMode mode;
    std::string algorithm;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (int len : plan.chain_lengths) {
    for (ChainMode m : plan.modes) {
      for (const auto& a : plan.algorithms) {
        for (std::uint64_t s : plan.seeds) cells.push_back({len, m, a, s});
      }
    }
  }

  RunOptions options;
  options.sweeps = plan.sweeps;
  options.scope = plan.scope;
  options.exact_limits = plan.exact_limits;

  std::vector<std::pair<ResultRow, ResultRow>> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      try {
        const Scenario sc = make_scenario(net, plan.base, c.length, c.mode, c.seed);
        TwoPhaseResult r = run_two_phase(sc, c.algorithm, c.seed, options);
        results[i] = {std::move(r.phase1), std::move(r.phase2)};
      } catch (const std::exception& e) {
        ResultRow r;
        r.chain_length = c.length;
        r.mode = c.mode;
        r.algorithm = c.algorithm;
        r.seed = c.seed;
        r.diagnostics = e.what();
        ResultRow r2 = r;
        r2.phase = 2;
        results[i] = {r, r2};
      }
    }
  };

  int workers = plan.workers;
  if (workers <= 0) {
    const char* env = std::getenv("SFCPLACE_WORKERS");
    workers = env ? std::max(1, std::atoi(env)) : 1;
  }
  workers = std::min<int>(workers, static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<ResultRow> rows;
  for (auto& [a, b] : results) {
    rows.push_back(std::move(a));
    rows.push_back(std::move(b));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reporting

const std::vector<std::string>& series_names() {
  static const std::vector<std::string> names{"total_costs", "edge_opex",   "cloud_charges",
                                              "penalties",   "migrations",  "replications",
                                              "link_util",   "server_util", "service_delay"};
  return names;
}

double metric_value(const ResultRow& row, const std::string& metric) {
  if (metric == "total_costs") return row.cost.total;
  if (metric == "edge_opex") return row.cost.edge_opex;
  if (metric == "cloud_charges") return row.cost.cloud_charges;
  if (metric == "penalties") return row.cost.penalties;
  if (metric == "migrations") return row.cost.n_mgr;
  if (metric == "replications") return row.cost.n_rep;
  if (metric == "link_util") return row.avg_link_util;
  if (metric == "server_util") return row.avg_server_util;
  if (metric == "service_delay") return row.avg_service_delay;
  throw std::invalid_argument("unknown metric " + metric);
}

std::vector<SeriesPoint> series(const std::vector<ResultRow>& rows, const std::string& metric) {
  std::map<std::tuple<int, int, std::string, int>, std::vector<double>> groups;
  for (const ResultRow& r : rows) {
    auto& g = groups[{r.phase, static_cast<int>(r.mode), r.algorithm, r.chain_length}];
    if (r.feasible) g.push_back(metric_value(r, metric));
  }
  std::vector<SeriesPoint> out;
  for (const auto& [key, values] : groups) {
    SeriesPoint p;
    p.phase = std::get<0>(key);
    p.mode = static_cast<ChainMode>(std::get<1>(key));
    p.algorithm = std::get<2>(key);
    p.chain_length = std::get<3>(key);
    p.n = static_cast<int>(values.size());
    for (double v : values) p.mean += v;
    if (p.n > 0) p.mean /= p.n;
    if (p.n > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - p.mean) * (v - p.mean);
      p.stddev = std::sqrt(ss / (p.n - 1));
    }
    out.push_back(p);
  }
  return out;
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void check_total(const ResultRow& r) {
  const auto& c = r.cost;
  if (c.total != c.edge_opex + c.cloud_charges + c.penalties) {
    throw std::logic_error("row total differs from the sum of its components");
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "chain_length,mode,algorithm,seed,phase,feasible,total,edge_opex,cloud_charges,penalties,"
        "n_mgr,n_rep,avg_link_util,avg_server_util,avg_service_delay\n";
  for (const ResultRow& r : rows) {
    check_total(r);
    os << r.chain_length << ',' << to_string(r.mode) << ',' << r.algorithm << ',' << r.seed << ','
       << r.phase << ',' << (r.feasible ? 1 : 0) << ',' << fmt(r.cost.total) << ','
       << fmt(r.cost.edge_opex) << ',' << fmt(r.cost.cloud_charges) << ','
       << fmt(r.cost.penalties) << ',' << r.cost.n_mgr << ',' << r.cost.n_rep << ','
       << fmt(r.avg_link_util) << ',' << fmt(r.avg_server_util) << ','
       << fmt(r.avg_service_delay) << '\n';
  }
  return os.str();
}

std::string results_json(const std::vector<ResultRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ResultRow& r : rows) {
    check_total(r);
    arr.push_back({{"chain_length", r.chain_length},
                   {"mode", to_string(r.mode)},
                   {"algorithm", r.algorithm},
                   {"seed", r.seed},
                   {"phase", r.phase},
                   {"feasible", r.feasible},
                   {"diagnostics", r.diagnostics},
                   {"total", r.cost.total},
                   {"edge_opex", r.cost.edge_opex},
                   {"cloud_charges", r.cost.cloud_charges},
                   {"penalties", r.cost.penalties},
                   {"n_mgr", r.cost.n_mgr},
                   {"n_rep", r.cost.n_rep},
                   {"avg_link_util", r.avg_link_util},
                   {"avg_server_util", r.avg_server_util},
                   {"avg_service_delay", r.avg_service_delay},
                   {"runtime", r.runtime_s}});
  }
  return arr.dump(1) + "\n";
}

std::string series_csv(const std::vector<SeriesPoint>& points) {
  std::ostringstream os;
  os << "phase,mode,algorithm,chain_length,n,mean,stddev\n";
  for (const SeriesPoint& p : points) {
    os << p.phase << ',' << to_string(p.mode) << ',' << p.algorithm << ',' << p.chain_length << ','
       << p.n << ',' << fmt(p.mean) << ',' << fmt(p.stddev) << '\n';
  }
  return os.str();
}

std::string summary_markdown(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "# Results summary\n\n";
  int infeasible = 0;
  for (const ResultRow& r : rows) infeasible += r.feasible ? 0 : 1;
  os << rows.size() << " rows, " << infeasible << " infeasible or refused.\n\n";
  const std::vector<std::string> cols{"total_costs", "edge_opex", "cloud_charges", "penalties",
                                      "migrations", "replications"};
  std::vector<std::vector<SeriesPoint>> data;
  for (const auto& c : cols) data.push_back(series(rows, c));
  for (int phase : {1, 2}) {
    os << "## Phase " << phase << "\n\n| algorithm | mode | length | n |";
    for (const auto& c : cols) os << ' ' << c << " |";
    os << "\n|---|---|---|---|";
    for (std::size_t i = 0; i < cols.size(); ++i) os << "---|";
    os << '\n';
    for (std::size_t i = 0; i < data[0].size(); ++i) {
      const SeriesPoint& p = data[0][i];
      if (p.phase != phase) continue;
      os << "| " << p.algorithm << " | " << to_string(p.mode) << " | " << p.chain_length << " | "
         << p.n << " |";
      for (const auto& d : data) os << ' ' << short_fmt(d[i].mean) << " ± " << short_fmt(d[i].stddev) << " |";
      os << '\n';
    }
    os << '\n';
  }
  bool header = false;
  for (const ResultRow& r : rows) {
    if (r.feasible || r.diagnostics.empty()) continue;
    if (!header) {
      os << "## Failed cells\n\n";
      header = true;
    }
    os << "- length " << r.chain_length << ", " << to_string(r.mode) << ", " << r.algorithm
       << ", seed " << r.seed << ", phase " << r.phase << ": " << r.diagnostics << '\n';
  }
  return os.str();
}

void write_report(const std::vector<ResultRow>& rows, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "series");
  write_file(fs::path(dir) / "results.csv", results_csv(rows));
  write_file(fs::path(dir) / "results.json", results_json(rows));
  for (const auto& name : series_names()) {
    write_file(fs::path(dir) / "series" / (name + ".csv"), series_csv(series(rows, name)));
  }
  write_file(fs::path(dir) / "summary.md", summary_markdown(rows));
}

namespace {

std::vector<std::uint64_t> parse_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) -> std::uint64_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError("not a non-negative integer: '" + s + "' in '" + text + "'");
    }
    return std::stoull(s);
  };
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(number(item));
    } else {
      const std::uint64_t a = number(item.substr(0, dots));
      const std::uint64_t b = number(item.substr(dots + 2));
      if (b < a) throw ParseError("empty range '" + item + "'");
      for (std::uint64_t v = a; v <= b; ++v) out.push_back(v);
    }
  }
  if (out.empty()) throw ParseError("empty list");
  return out;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (std::uint64_t v : parse_list(text)) out.push_back(static_cast<int>(v));
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) { return parse_list(text); }

}  // namespace sfcplace
