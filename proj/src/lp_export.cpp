#include "sfcplace/lp_export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "sfcplace/cost.hpp"
#include "sfcplace/error.hpp"

namespace sfcplace {

int LpModel::find(const std::string& name) const {
  const auto it = index.find(name);
  return it == index.end() ? -1 : it->second;
}

namespace {

std::string idx(const char* prefix, std::initializer_list<std::pair<const char*, int>> parts) {
  std::string out = prefix;
  for (const auto& [tag, value] : parts) {
    out += "_";
    out += tag;
    out += std::to_string(value);
  }
  return out;
}

std::string n_z(int s, int p) { return idx("z", {{"s", s}, {"p", p}}); }
std::string n_zl(int s, int l, int p) { return idx("zl", {{"s", s}, {"l", l}, {"p", p}}); }
std::string n_fx(int x) { return idx("fx", {{"x", x}}); }
std::string n_f(int x, int v, int s) { return idx("f", {{"x", x}, {"v", v}, {"s", s}}); }
std::string n_fl(int x, int v, int s, int l) { return idx("fl", {{"x", x}, {"v", v}, {"s", s}, {"l", l}}); }
std::string n_g(int x, int y, int v, int s) { return idx("g", {{"x", x}, {"y", y}, {"v", v}, {"s", s}}); }
std::string n_h(int p, int v, int s) { return idx("h", {{"p", p}, {"v", v}, {"s", s}}); }
std::string n_q(int s, int l, int p) { return idx("q", {{"s", s}, {"l", l}, {"p", p}}); }
std::string n_d(int s, int l, int p) { return idx("d", {{"s", s}, {"l", l}, {"p", p}}); }
std::string n_y(int s, int l, int p) { return idx("y", {{"s", s}, {"l", l}, {"p", p}}); }
std::string n_dl(int x, int v, int s, int l) { return idx("dl", {{"x", x}, {"v", v}, {"s", s}, {"l", l}}); }
std::string n_ul(int k) { return idx("u", {{"l", k}}); }
std::string n_ux(int x) { return idx("u", {{"x", x}}); }

// What a decision variable stands for, for solution import.
struct VarMeta {
  char kind = ' ';  // 'r' demand route, 'a' demand assignment, 'h' sync path, ' ' other
  int a = 0, b = 0, c = 0, d = 0;
};

struct SfcData {
  std::vector<ServerId> servers;  // all servers on admissible paths, by id
  std::vector<NodeId> nodes;      // their nodes, ascending
  // Sync candidates per ordered node pair.
  std::vector<std::pair<std::pair<NodeId, NodeId>, std::vector<PathId>>> sync;
};

class Builder {
 public:
  Builder(const Scenario& sc, const std::optional<Snapshot>& snapshot, const Placement* at)
      : sc_(sc), net_(sc.net()), snapshot_(snapshot), at_(at) {
    for (const Sfc& s : sc.sfcs) data_.push_back(sfc_data(s));
  }

  void build() {
    variables();
    objective();
    constraints();
  }

  LpModel model;
  std::vector<VarMeta> meta;
  std::vector<double> values;

 private:
  SfcData sfc_data(const Sfc& s) const {
    SfcData d;
    std::set<ServerId> xs;
    for (PathId p : s.admissible_paths) {
      for (ServerId x : net_.path(p).servers) xs.insert(x);
    }
    d.servers.assign(xs.begin(), xs.end());
    std::set<NodeId> nodes;
    for (ServerId x : xs) nodes.insert(net_.server(x).node);
    d.nodes.assign(nodes.begin(), nodes.end());
    for (NodeId n : d.nodes) {
      for (NodeId m : d.nodes) {
        if (n == m) continue;
        const auto it = net_.catalog().sync_paths.find({n, m});
        std::vector<PathId> ps;
        if (it != net_.catalog().sync_paths.end()) ps = it->second;
        d.sync.push_back({{n, m}, ps});
      }
    }
    return d;
  }

  int add(const std::string& name, VarKind kind, double value, VarMeta m = {},
          double ub = kInfiniteCapacity) {
    const int i = static_cast<int>(model.vars.size());
    model.vars.push_back({name, kind, 0.0, kind == VarKind::Binary ? 1.0 : ub});
    model.index[name] = i;
    meta.push_back(m);
    values.push_back(value);
    return i;
  }

  int v(const std::string& name) const { return model.index.at(name); }
  double val(const std::string& name) const { return values[v(name)]; }

  void row(std::string name, std::vector<LpTerm> terms, RowSense sense, double rhs) {
    std::vector<LpTerm> merged;
    for (const LpTerm& t : terms) {
      auto it = std::find_if(merged.begin(), merged.end(), [&](const LpTerm& m) { return m.var == t.var; });
      if (it == merged.end()) {
        merged.push_back(t);
      } else {
        it->coef += t.coef;
      }
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const LpTerm& t) { return t.coef == 0.0; }),
                 merged.end());
    if (merged.empty()) return;
    model.rows.push_back({std::move(name), std::move(merged), sense, rhs});
  }

  bool in_snapshot(int s, int vnf, ServerId x) const {
    return snapshot_ && snapshot_->count(InstanceKey{s, vnf, x});
  }

  // Snapshot instances of s (valid positions only).
  int snapshot_count(int s) const {
    if (!snapshot_) return 0;
    int n = 0;
    for (const auto& k : *snapshot_) {
      if (k.sfc == s && k.vnf >= 0 && k.vnf < sc_.sfcs[s].length()) ++n;
    }
    return n;
  }

  // --- values at the evaluation point --------------------------------------

  double at_route(int l, PathId p) const { return at_ && at_->state().route[l] == p ? 1.0 : 0.0; }
  double at_assign(int l, int vnf, ServerId x) const {
    if (!at_) return 0.0;
    const auto& xs = at_->state().servers[l];
    return vnf < static_cast<int>(xs.size()) && xs[vnf] == x ? 1.0 : 0.0;
  }
  double at_hosts(int s, int vnf, ServerId x) const {
    return at_ && at_->occupancy().hosts(s, vnf, x) ? 1.0 : 0.0;
  }
  double at_sync(int s, int vnf, PathId p) const {
    if (!at_) return 0.0;
    for (const auto& [k, q] : at_->state().sync) {
      if (k.sfc == s && k.vnf == vnf && q == p) return 1.0;
    }
    return 0.0;
  }

  std::vector<ServerId> used_servers() const {
    std::set<ServerId> xs;
    for (const SfcData& d : data_) xs.insert(d.servers.begin(), d.servers.end());
    return {xs.begin(), xs.end()};
  }

  void variables() {
    for (const Sfc& s : sc_.sfcs) {
      for (PathId p : s.admissible_paths) {
        const double used = at_ && at_->occupancy().path_use(s.id).count(p) ? 1.0 : 0.0;
        add(n_z(s.id, p), VarKind::Binary, used);
      }
    }
    for (const Sfc& s : sc_.sfcs) {
      for (int l : s.demands) {
        for (PathId p : s.admissible_paths) {
          add(n_zl(s.id, l, p), VarKind::Binary, at_route(l, p), {'r', s.id, l, p});
        }
      }
    }
    for (ServerId x : used_servers()) {
      add(n_fx(x), VarKind::Binary, at_ && at_->occupancy().hosted_count(x) > 0 ? 1.0 : 0.0);
    }
    for (const Sfc& s : sc_.sfcs) {
      for (int vnf = 0; vnf < s.length(); ++vnf) {
        for (ServerId x : data_[s.id].servers) add(n_f(x, vnf, s.id), VarKind::Binary, at_hosts(s.id, vnf, x));
      }
    }
    for (const Sfc& s : sc_.sfcs) {
      for (int vnf = 0; vnf < s.length(); ++vnf) {
        for (ServerId x : data_[s.id].servers) {
          for (int l : s.demands) {
            add(n_fl(x, vnf, s.id, l), VarKind::Binary, at_assign(l, vnf, x), {'a', x, vnf, s.id, l});
          }
        }
      }
    }
    for (const Sfc& s : sc_.sfcs) {
      const auto& xs = data_[s.id].servers;
      for (int vnf = 0; vnf < s.length(); ++vnf) {
        for (ServerId x : xs) {
          for (ServerId y : xs) {
            if (net_.server(x).node == net_.server(y).node) continue;
            add(n_g(x, y, vnf, s.id), VarKind::Binary, at_hosts(s.id, vnf, x) * at_hosts(s.id, vnf, y));
          }
        }
      }
    }
    for (const Sfc& s : sc_.sfcs) {
      for (int vnf = 0; vnf < s.length(); ++vnf) {
        for (const auto& [pair, paths] : data_[s.id].sync) {
          for (PathId p : paths) add(n_h(p, vnf, s.id), VarKind::Binary, at_sync(s.id, vnf, p), {'h', p, vnf, s.id});
        }
      }
    }
    // Continuous delay and penalty variables. Values follow the placement's
    // exact delays.
    for (const Sfc& s : sc_.sfcs) {
      for (int l : s.demands) {
        for (PathId p : s.admissible_paths) {
          const double d = at_ ? path_delay(s, l, p) : 0.0;
          const double z = at_route(l, p);
          const double y = z * d;
          const double q = std::max(0.0, s.penalty_rate / s.d_max * y - s.penalty_rate * z);
          add(n_q(s.id, l, p), VarKind::Continuous, q);
          add(n_d(s.id, l, p), VarKind::Continuous, d);
          add(n_y(s.id, l, p), VarKind::Continuous, y);
        }
      }
    }
    for (const Sfc& s : sc_.sfcs) {
      for (int vnf = 0; vnf < s.length(); ++vnf) {
        for (ServerId x : data_[s.id].servers) {
          for (int l : s.demands) add(n_dl(x, vnf, s.id, l), VarKind::Continuous, assigned_delay(s.id, vnf, x, l));
        }
      }
    }
    for (const Link& link : net_.links()) {
      if (link.unlimited()) continue;
      add(n_ul(link.id), VarKind::Continuous, at_ ? at_->occupancy().link_util(link.id) : 0.0, {}, 1.0);
    }
    for (ServerId x : used_servers()) {
      add(n_ux(x), VarKind::Continuous, at_ ? at_->occupancy().server_util(x) : 0.0, {}, 1.0);
    }
  }

  double assigned_delay(int s, int vnf, ServerId x, int l) const {
    if (at_assign(l, vnf, x) == 0.0) return 0.0;
    return processing_delay(*at_, x, s, vnf);
  }

  double path_delay(const Sfc& s, int l, PathId p) const {
    const Path& path = net_.path(p);
    double d = path.total_prop_delay;
    for (ServerId x : path.servers) {
      for (int vnf = 0; vnf < s.length(); ++vnf) d += assigned_delay(s.id, vnf, x, l);
    }
    return d + downtime(*at_, s.id);
  }

  void objective() {
    for (ServerId x : used_servers()) {
      const Server& srv = net_.server(x);
      if (srv.is_cloud) continue;
      model.objective.push_back({v(n_fx(x)), srv.idle_energy_cost});
      model.objective.push_back({v(n_ux(x)), srv.utilization_cost_slope});
      model.objective_offset += srv.fixed_maintenance_cost;
    }
    for (const Sfc& s : sc_.sfcs) {
      for (int vnf = 0; vnf < s.length(); ++vnf) {
        for (ServerId x : data_[s.id].servers) {
          if (net_.server(x).is_cloud) {
            model.objective.push_back({v(n_f(x, vnf, s.id)), sc_.vnf(s.id, vnf).cloud_price});
          }
        }
      }
    }
    for (const Sfc& s : sc_.sfcs) {
      for (int l : s.demands) {
        for (PathId p : s.admissible_paths) model.objective.push_back({v(n_q(s.id, l, p)), 1.0});
      }
    }
  }

  void constraints() {
    const auto servers = used_servers();
    int total_positions = 0;
    for (const Sfc& s : sc_.sfcs) total_positions += s.length();

    for (const Sfc& s : sc_.sfcs) {
      const SfcData& sd = data_[s.id];
      const std::string tag = "_s" + std::to_string(s.id);
      // Penalty and its product linearization.
      for (int l : s.demands) {
        for (PathId p : s.admissible_paths) {
          const std::string k = tag + "_l" + std::to_string(l) + "_p" + std::to_string(p);
          const int q = v(n_q(s.id, l, p)), y = v(n_y(s.id, l, p)), d = v(n_d(s.id, l, p));
          const int z = v(n_zl(s.id, l, p));
          row("penalty" + k, {{q, 1.0}, {y, -s.penalty_rate / s.d_max}, {z, s.penalty_rate}}, RowSense::GE, 0.0);
          row("ylin_a" + k, {{y, 1.0}, {d, -1.0}}, RowSense::LE, 0.0);
          row("ylin_b" + k, {{y, 1.0}, {z, -s.d_hat_max}}, RowSense::LE, 0.0);
          row("ylin_c" + k, {{y, 1.0}, {d, -1.0}, {z, -s.d_hat_max}}, RowSense::GE, -s.d_hat_max);
        }
      }
      // Routing.
      for (int l : s.demands) {
        std::vector<LpTerm> t;
        for (PathId p : s.admissible_paths) t.push_back({v(n_zl(s.id, l, p)), 1.0});
        row("one_path" + tag + "_l" + std::to_string(l), t, RowSense::EQ, 1.0);
      }
      for (PathId p : s.admissible_paths) {
        const int z = v(n_z(s.id, p));
        std::vector<LpTerm> upper{{z, 1.0}};
        for (int l : s.demands) {
          row("path_on" + tag + "_l" + std::to_string(l) + "_p" + std::to_string(p),
              {{v(n_zl(s.id, l, p)), 1.0}, {z, -1.0}}, RowSense::LE, 0.0);
          upper.push_back({v(n_zl(s.id, l, p)), -1.0});
        }
        row("path_off" + tag + "_p" + std::to_string(p), upper, RowSense::LE, 0.0);
      }
      // VNF placement.
      for (int vnf = 0; vnf < s.length(); ++vnf) {
        const std::string kv = tag + "_v" + std::to_string(vnf);
        for (int l : s.demands) {
          std::vector<LpTerm> t;
          for (ServerId x : sd.servers) t.push_back({v(n_fl(x, vnf, s.id, l)), 1.0});
          row("one_server" + kv + "_l" + std::to_string(l), t, RowSense::EQ, 1.0);
        }
        for (ServerId x : sd.servers) {
          const int f = v(n_f(x, vnf, s.id));
          std::vector<LpTerm> upper{{f, 1.0}};
          for (int l : s.demands) {
            row("vnf_on" + kv + "_x" + std::to_string(x) + "_l" + std::to_string(l),
                {{v(n_fl(x, vnf, s.id, l)), 1.0}, {f, -1.0}}, RowSense::LE, 0.0);
            upper.push_back({v(n_fl(x, vnf, s.id, l)), -1.0});
          }
          row("vnf_off" + kv + "_x" + std::to_string(x), upper, RowSense::LE, 0.0);
        }
        // Replication limit.
        const double r = sc_.vnf(s.id, vnf).replicable ? 1.0 : 0.0;
        std::vector<LpTerm> rep;
        for (ServerId x : sd.servers) rep.push_back({v(n_f(x, vnf, s.id)), 1.0});
        for (PathId p : s.admissible_paths) rep.push_back({v(n_z(s.id, p)), -r});
        row("replicas" + kv, rep, RowSense::LE, 1.0 - r);
        // VNFs on the demand's path.
        for (int l : s.demands) {
          for (PathId p : s.admissible_paths) {
            std::vector<LpTerm> t{{v(n_zl(s.id, l, p)), 1.0}};
            for (ServerId x : net_.path(p).servers) t.push_back({v(n_fl(x, vnf, s.id, l)), -1.0});
            row("on_path" + kv + "_l" + std::to_string(l) + "_p" + std::to_string(p), t, RowSense::LE, 0.0);
          }
        }
        // Chain order along each path.
        if (vnf > 0) {
          for (int l : s.demands) {
            for (PathId p : s.admissible_paths) {
              const Path& path = net_.path(p);
              std::vector<LpTerm> prefix;
              for (std::size_t n = 0; n < path.nodes.size(); ++n) {
                for (ServerId y : net_.servers_at(path.nodes[n])) prefix.push_back({v(n_fl(y, vnf - 1, s.id, l)), 1.0});
                std::vector<LpTerm> t = prefix;
                for (ServerId x : net_.servers_at(path.nodes[n])) t.push_back({v(n_fl(x, vnf, s.id, l)), -1.0});
                if (net_.servers_at(path.nodes[n]).empty()) continue;
                t.push_back({v(n_zl(s.id, l, p)), -1.0});
                row("order" + kv + "_l" + std::to_string(l) + "_p" + std::to_string(p) + "_n" + std::to_string(n),
                    t, RowSense::GE, -1.0);
              }
            }
          }
        }
        // Replica pairs and sync path selection.
        for (ServerId x : sd.servers) {
          for (ServerId y : sd.servers) {
            if (net_.server(x).node == net_.server(y).node) continue;
            const int g = v(n_g(x, y, vnf, s.id));
            const int fx = v(n_f(x, vnf, s.id)), fy = v(n_f(y, vnf, s.id));
            const std::string kg = kv + "_x" + std::to_string(x) + "_y" + std::to_string(y);
            row("pair_a" + kg, {{g, 1.0}, {fx, -1.0}}, RowSense::LE, 0.0);
            row("pair_b" + kg, {{g, 1.0}, {fy, -1.0}}, RowSense::LE, 0.0);
            row("pair_c" + kg, {{g, 1.0}, {fx, -1.0}, {fy, -1.0}}, RowSense::GE, -1.0);
          }
        }
        for (const auto& [pair, paths] : sd.sync) {
          const auto [n, m] = pair;
          const std::string kn = kv + "_n" + std::to_string(n) + "_m" + std::to_string(m);
          std::vector<LpTerm> hsum;
          for (PathId p : paths) hsum.push_back({v(n_h(p, vnf, s.id)), 1.0});
          std::vector<LpTerm> off = hsum;
          for (ServerId x : net_.servers_at(n)) {
            if (!std::binary_search(sd.servers.begin(), sd.servers.end(), x)) continue;
            for (ServerId y : net_.servers_at(m)) {
              if (!std::binary_search(sd.servers.begin(), sd.servers.end(), y)) continue;
              std::vector<LpTerm> t{{v(n_g(x, y, vnf, s.id)), 1.0}};
              for (const LpTerm& h : hsum) t.push_back({h.var, -1.0});
              row("sync_on" + kv + "_x" + std::to_string(x) + "_y" + std::to_string(y), t, RowSense::LE, 0.0);
              off.push_back({v(n_g(x, y, vnf, s.id)), -1.0});
            }
          }
          row("sync_one" + kn, hsum, RowSense::LE, 1.0);
          if (!hsum.empty()) row("sync_off" + kn, off, RowSense::LE, 0.0);
        }
      }
    }

    // Servers in use.
    for (ServerId x : servers) {
      std::vector<LpTerm> fs;
      for (const Sfc& s : sc_.sfcs) {
        if (!std::binary_search(data_[s.id].servers.begin(), data_[s.id].servers.end(), x)) continue;
        for (int vnf = 0; vnf < s.length(); ++vnf) fs.push_back({v(n_f(x, vnf, s.id)), 1.0});
      }
      const int fx = v(n_fx(x));
      std::vector<LpTerm> lo = fs;
      lo.push_back({fx, -static_cast<double>(total_positions)});
      row("used_lo_x" + std::to_string(x), lo, RowSense::LE, 0.0);
      std::vector<LpTerm> hi{{fx, 1.0}};
      for (const LpTerm& t : fs) hi.push_back({t.var, -1.0});
      row("used_hi_x" + std::to_string(x), hi, RowSense::LE, 0.0);
    }

    // Link utilization.
    for (const Link& link : net_.links()) {
      if (link.unlimited()) continue;
      std::vector<LpTerm> t;
      for (const Sfc& s : sc_.sfcs) {
        for (PathId p : s.admissible_paths) {
          if (!net_.path(p).contains_link(link.id)) continue;
          for (int l : s.demands) t.push_back({v(n_zl(s.id, l, p)), sc_.demands[l].bandwidth});
        }
      }
      for (const Sfc& s : sc_.sfcs) {
        for (int vnf = 0; vnf < s.length(); ++vnf) {
          const double amount = sc_.vnf(s.id, vnf).sync_ratio * static_cast<double>(s.demands.size());
          for (const auto& [pair, paths] : data_[s.id].sync) {
            for (PathId p : paths) {
              if (net_.path(p).contains_link(link.id)) t.push_back({v(n_h(p, vnf, s.id)), amount});
            }
          }
        }
      }
      t.push_back({v(n_ul(link.id)), -link.capacity_max});
      row("link_util_l" + std::to_string(link.id), t, RowSense::EQ, 0.0);
    }

    // Server load and utilization.
    for (ServerId x : servers) {
      std::vector<LpTerm> t;
      for (const Sfc& s : sc_.sfcs) {
        if (!std::binary_search(data_[s.id].servers.begin(), data_[s.id].servers.end(), x)) continue;
        for (int vnf = 0; vnf < s.length(); ++vnf) {
          const VnfType& type = sc_.vnf(s.id, vnf);
          for (int l : s.demands) t.push_back({v(n_fl(x, vnf, s.id, l)), type.load_ratio * sc_.demands[l].bandwidth});
          t.push_back({v(n_f(x, vnf, s.id)), type.overhead});
        }
      }
      t.push_back({v(n_ux(x)), -net_.server(x).capacity_max});
      row("server_util_x" + std::to_string(x), t, RowSense::EQ, 0.0);
    }

    // Per-demand processing delay bounds and end-to-end delay.
    for (const Sfc& s : sc_.sfcs) {
      for (int vnf = 0; vnf < s.length(); ++vnf) {
        const VnfType& type = sc_.vnf(s.id, vnf);
        for (ServerId x : data_[s.id].servers) {
          for (int l : s.demands) {
            const int dl = v(n_dl(x, vnf, s.id, l));
            const int fl = v(n_fl(x, vnf, s.id, l));
            std::vector<LpTerm> lo{{dl, 1.0}};
            for (int l2 : s.demands) {
              lo.push_back({v(n_fl(x, vnf, s.id, l2)),
                            -type.delay_queue * type.load_ratio * sc_.demands[l2].bandwidth / type.proc_capacity_max});
            }
            lo.push_back({v(n_f(x, vnf, s.id)), -type.delay_proc_min});
            lo.push_back({v(n_ux(x)), -type.delay_proc_slope});
            lo.push_back({fl, -type.delay_proc_max});
            const std::string k = "_x" + std::to_string(x) + "_v" + std::to_string(vnf) + "_s" +
                                  std::to_string(s.id) + "_l" + std::to_string(l);
            row("delay_lo" + k, lo, RowSense::GE, -type.delay_proc_max);
            row("delay_hi" + k, {{dl, 1.0}, {fl, -type.delay_proc_max}}, RowSense::LE, 0.0);
          }
        }
      }
      const int moved_base = snapshot_count(s.id);
      for (int l : s.demands) {
        for (PathId p : s.admissible_paths) {
          const Path& path = net_.path(p);
          std::vector<LpTerm> t{{v(n_d(s.id, l, p)), 1.0}};
          for (ServerId x : path.servers) {
            for (int vnf = 0; vnf < s.length(); ++vnf) t.push_back({v(n_dl(x, vnf, s.id, l)), -1.0});
          }
          for (int vnf = 0; vnf < s.length(); ++vnf) {
            for (ServerId x : data_[s.id].servers) {
              if (in_snapshot(s.id, vnf, x)) t.push_back({v(n_f(x, vnf, s.id)), sc_.params.d_dwt});
            }
          }
          row("delay_s" + std::to_string(s.id) + "_l" + std::to_string(l) + "_p" + std::to_string(p), t,
              RowSense::EQ, path.total_prop_delay + sc_.params.d_dwt * moved_base);
        }
      }
    }
  }

  const Scenario& sc_;
  const NetworkModel& net_;
  const std::optional<Snapshot>& snapshot_;
  const Placement* at_;
  std::vector<SfcData> data_;
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

void write_terms(std::ostringstream& os, const LpModel& m, const std::vector<LpTerm>& terms) {
  int col = 0;
  bool first = true;
  for (const LpTerm& t : terms) {
    if (col == 6) {
      os << "\n   ";
      col = 0;
    }
    const double c = t.coef;
    if (first) {
      os << (c < 0 ? " - " : " ") << num(std::abs(c)) << " " << m.vars[t.var].name;
    } else {
      os << (c < 0 ? " - " : " + ") << num(std::abs(c)) << " " << m.vars[t.var].name;
    }
    first = false;
    ++col;
  }
}

}  // namespace

LpModel build_milp(const Scenario& scenario, const std::optional<Snapshot>& snapshot) {
  Builder b(scenario, snapshot, nullptr);
  b.build();
  return std::move(b.model);
}

std::string write_lp(const LpModel& m) {
  std::ostringstream os;
  os << "\\ sfcplace placement model: " << m.vars.size() << " variables, " << m.rows.size()
     << " constraints\n";
  if (m.objective_offset != 0.0) os << "\\ objective constant not written: " << num(m.objective_offset) << "\n";
  os << "Minimize\n obj:";
  write_terms(os, m, m.objective);
  os << "\nSubject To\n";
  for (const LpRow& r : m.rows) {
    os << " " << r.name << ":";
    write_terms(os, m, r.terms);
    switch (r.sense) {
      case RowSense::LE: os << " <= "; break;
      case RowSense::GE: os << " >= "; break;
      case RowSense::EQ: os << " = "; break;
    }
    os << num(r.rhs) << "\n";
  }
  os << "Bounds\n";
  for (const LpVar& v : m.vars) {
    if (v.kind == VarKind::Continuous && std::isfinite(v.ub)) {
      os << " " << num(v.lb) << " <= " << v.name << " <= " << num(v.ub) << "\n";
    }
  }
  os << "Binary\n";
  int col = 0;
  for (const LpVar& v : m.vars) {
    if (v.kind != VarKind::Binary) continue;
    os << (col == 0 ? " " : " ") << v.name;
    if (++col == 8) {
      os << "\n";
      col = 0;
    }
  }
  if (col != 0) os << "\n";
  os << "End\n";
  return os.str();
}

std::string export_milp(const Scenario& scenario, const std::optional<Snapshot>& snapshot) {
  return write_lp(build_milp(scenario, snapshot));
}

std::map<std::string, double> lp_point(const PlacementState& state, const Scenario& scenario) {
  const Placement pl(scenario, state);
  Builder b(scenario, state.snapshot, &pl);
  b.build();
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < b.model.vars.size(); ++i) out[b.model.vars[i].name] = b.values[i];
  return out;
}

std::string write_solution(const PlacementState& state, const Scenario& scenario) {
  const Placement pl(scenario, state);
  Builder b(scenario, state.snapshot, &pl);
  b.build();
  std::ostringstream os;
  for (std::size_t i = 0; i < b.model.vars.size(); ++i) {
    if (b.values[i] == 0.0) continue;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", b.values[i]);
    os << b.model.vars[i].name << " " << buf << "\n";
  }
  return os.str();
}

PlacementState import_solution(const std::string& text, const Scenario& scenario,
                               const std::optional<Snapshot>& snapshot) {
  Builder b(scenario, snapshot, nullptr);
  b.build();
  PlacementState st = PlacementState::empty(scenario);
  st.snapshot = snapshot;
  for (std::size_t d = 0; d < scenario.demands.size(); ++d) {
    const int sfc = scenario.demands[d].sfc;
    st.servers[d].assign(scenario.sfcs[sfc].length(), kNone);
  }
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name) || name[0] == '#' || name[0] == '\\') continue;
    double value = 0.0;
    if (!(ls >> value)) throw ParseError("line " + std::to_string(line_no) + ": missing value for " + name);
    const int i = b.model.find(name);
    if (i < 0) throw ParseError("line " + std::to_string(line_no) + ": unknown variable " + name);
    if (b.model.vars[i].kind != VarKind::Binary) continue;
    if (std::abs(value - std::round(value)) > 1e-4 || value < -1e-4 || value > 1.0 + 1e-4) {
      throw ParseError("binary variable " + name + " has non-integral value " + num(value));
    }
    if (value < 0.5) continue;
    const VarMeta& m = b.meta[i];
    if (m.kind == 'r') {
      if (st.route[m.b] != kNone) throw ParseError("demand " + std::to_string(m.b) + " routed on several paths");
      st.route[m.b] = m.c;
    } else if (m.kind == 'a') {
      ServerId& slot = st.servers[m.d][m.b];
      if (slot != kNone) {
        throw ParseError("demand " + std::to_string(m.d) + " has several servers for VNF " + std::to_string(m.b));
      }
      slot = m.a;
    } else if (m.kind == 'h') {
      const Path& p = scenario.net().path(m.a);
      const SyncKey key{m.c, m.b, p.src(), p.dst()};
      if (st.sync.count(key)) throw ParseError("several sync paths for one node pair");
      st.sync[key] = m.a;
    }
  }
  for (std::size_t d = 0; d < scenario.demands.size(); ++d) {
    if (st.route[d] == kNone &&
        std::all_of(st.servers[d].begin(), st.servers[d].end(), [](ServerId x) { return x == kNone; })) {
      st.servers[d].clear();
    }
  }
  return st;
}

}  // namespace sfcplace
