#include "sfcplace/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <set>
#include <sstream>

#include "sfcplace/error.hpp"

namespace sfcplace {

namespace {

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kFiberSpeedKmPerMs = 299792.458 * 2.0 / 3.0 / 1000.0;

template <typename T>
void check_contiguous(const std::vector<T>& items, const char* what) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].id != static_cast<int>(i)) {
      throw ModelError(std::string(what) + " ids must be unique and contiguous from 0 (expected " +
                       std::to_string(i) + ", found " + std::to_string(items[i].id) + ")");
    }
  }
}

struct Candidate {
  double delay;
  std::vector<NodeId> nodes;
  std::vector<LinkId> links;

  bool operator<(const Candidate& o) const {
    if (delay != o.delay) return delay < o.delay;
    return nodes < o.nodes;
  }
};

double links_delay(const NetworkModel& model, const std::vector<LinkId>& links) {
  double d = 0.0;
  for (LinkId l : links) d += model.link(l).prop_delay;
  return d;
}

std::vector<NodeId> links_nodes(const NetworkModel& model, NodeId src,
                                const std::vector<LinkId>& links) {
  std::vector<NodeId> nodes{src};
  for (LinkId l : links) nodes.push_back(model.link(l).dst);
  return nodes;
}

// Dijkstra with (distance, node sequence) labels compared lexicographically,
// which makes equal-delay ties resolve to the lexicographically smallest path.
std::optional<std::vector<LinkId>> shortest_path(const NetworkModel& model, NodeId src,
                                                 NodeId dst, const std::vector<bool>& banned,
                                                 const std::set<LinkId>& removed_links) {
  const std::size_t n = model.nodes().size();
  if (banned[src] || banned[dst]) return std::nullopt;
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::vector<NodeId>> seq(n);
  std::vector<std::vector<LinkId>> via(n);
  std::vector<bool> done(n, false);
  dist[src] = 0.0;
  seq[src] = {src};
  for (;;) {
    NodeId u = kNone;
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v] || !std::isfinite(dist[v])) continue;
      if (u == kNone || dist[v] < dist[u] || (dist[v] == dist[u] && seq[v] < seq[u])) {
        u = static_cast<NodeId>(v);
      }
    }
    if (u == kNone) return std::nullopt;
    if (u == dst) return via[u];
    done[u] = true;
    for (LinkId l : model.out_links(u)) {
      if (removed_links.count(l)) continue;
      const NodeId w = model.link(l).dst;
      if (banned[w] || done[w]) continue;
      const double nd = dist[u] + model.link(l).prop_delay;
      std::vector<NodeId> ns = seq[u];
      ns.push_back(w);
      if (nd < dist[w] || (nd == dist[w] && ns < seq[w])) {
        dist[w] = nd;
        seq[w] = std::move(ns);
        via[w] = via[u];
        via[w].push_back(l);
      }
    }
  }
}

std::optional<Candidate> cloud_path(const NetworkModel& model, NodeId src, NodeId dst) {
  const std::size_t n = model.nodes().size();
  std::vector<bool> cloud(n, false);
  for (const Node& node : model.nodes()) cloud[node.id] = node.is_cloud;
  std::optional<Candidate> best;

  auto consider = [&](const std::vector<LinkId>& head, LinkId in, LinkId out,
                      const std::vector<LinkId>& tail) {
    std::vector<LinkId> links = head;
    links.push_back(in);
    links.push_back(out);
    links.insert(links.end(), tail.begin(), tail.end());
    Candidate c{links_delay(model, links), links_nodes(model, src, links), links};
    std::set<NodeId> uniq(c.nodes.begin(), c.nodes.end());
    if (uniq.size() != c.nodes.size()) return;
    if (!best || c < *best) best = std::move(c);
  };

  // Unconstrained heads and tails per gateway. When they share no node the
  // pair is final; otherwise each side is recomputed avoiding the other.
  std::map<NodeId, std::optional<std::vector<LinkId>>> heads, tails;
  auto head_to = [&](NodeId a) -> const std::optional<std::vector<LinkId>>& {
    auto it = heads.find(a);
    if (it == heads.end()) it = heads.emplace(a, shortest_path(model, src, a, cloud, {})).first;
    return it->second;
  };
  auto tail_from = [&](NodeId b) -> const std::optional<std::vector<LinkId>>& {
    auto it = tails.find(b);
    if (it == tails.end()) it = tails.emplace(b, shortest_path(model, b, dst, cloud, {})).first;
    return it->second;
  };

  // Gateway pairs by a lower bound on their best path's delay, so the scan can
  // stop once the bound exceeds the incumbent.
  struct Hop {
    double bound;
    LinkId in, out;
  };
  std::vector<Hop> hops;
  for (const Node& c : model.nodes()) {
    if (!c.is_cloud) continue;
    for (const Link& in : model.links()) {
      if (in.dst != c.id || cloud[in.src]) continue;
      for (LinkId out_id : model.out_links(c.id)) {
        const Link& out = model.link(out_id);
        if (cloud[out.dst] || out.dst == in.src) continue;
        const auto& h0 = head_to(in.src);
        const auto& t0 = tail_from(out.dst);
        if (!h0 || !t0) continue;  // constrained searches cannot do better
        hops.push_back({links_delay(model, *h0) + in.prop_delay + out.prop_delay + links_delay(model, *t0),
                        in.id, out_id});
      }
    }
  }
  std::stable_sort(hops.begin(), hops.end(), [](const Hop& x, const Hop& y) { return x.bound < y.bound; });

  for (const Hop& hop : hops) {
    if (best && hop.bound > best->delay + 1e-9) break;
    const NodeId a = model.link(hop.in).src;
    const NodeId b = model.link(hop.out).dst;
    const auto& h0 = *head_to(a);
    const auto& t0 = *tail_from(b);
    const auto hn = links_nodes(model, src, h0);
    const auto tn = links_nodes(model, b, t0);
    const std::set<NodeId> hs(hn.begin(), hn.end());
    if (std::none_of(tn.begin(), tn.end(), [&](NodeId v) { return hs.count(v) > 0; })) {
      consider(h0, hop.in, hop.out, t0);
      continue;
    }
    // Head first, then tail avoiding the head's nodes; and the reverse.
    std::vector<bool> banned = cloud;
    for (NodeId v : hn) banned[v] = true;
    if (auto tail = shortest_path(model, b, dst, banned, {})) consider(h0, hop.in, hop.out, *tail);
    banned = cloud;
    for (NodeId v : tn) banned[v] = true;
    if (auto head = shortest_path(model, src, a, banned, {})) consider(*head, hop.in, hop.out, t0);
  }
  return best;
}

GeoPoint require_location(const Node& node) {
  if (!node.location) {
    throw ModelError("node " + std::to_string(node.id) + " has no coordinates");
  }
  return *node.location;
}

bool is_placeholder(const std::string& tok) { return tok == "-"; }

double parse_number(const std::string& tok, int line_no) {
  if (tok == "inf") return kInfiniteCapacity;
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": not a number: '" + tok + "'");
  }
}

int parse_int(const std::string& tok, int line_no) {
  const double v = parse_number(tok, line_no);
  if (v != std::floor(v) || !std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line_no) + ": not an integer: '" + tok + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

int Path::node_position(NodeId node) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] == node) return static_cast<int>(i);
  }
  return kNone;
}

bool Path::contains_server(ServerId server) const {
  return std::find(servers.begin(), servers.end(), server) != servers.end();
}

bool Path::contains_link(LinkId link) const {
  return std::find(links.begin(), links.end(), link) != links.end();
}

NetworkModel::NetworkModel(std::vector<Node> nodes, std::vector<Server> servers,
                           std::vector<Link> links)
    : nodes_(std::move(nodes)), servers_(std::move(servers)), links_(std::move(links)) {
  check_contiguous(nodes_, "node");
  check_contiguous(servers_, "server");
  check_contiguous(links_, "link");
  servers_at_.resize(nodes_.size());
  out_links_.resize(nodes_.size());
  for (const Server& s : servers_) {
    if (s.node < 0 || s.node >= static_cast<int>(nodes_.size())) {
      throw ModelError("server " + std::to_string(s.id) + " references unknown node " +
                       std::to_string(s.node));
    }
    if (!(s.capacity_max > 0.0)) {
      throw ModelError("server " + std::to_string(s.id) + " has non-positive capacity");
    }
    servers_at_[s.node].push_back(s.id);
  }
  std::set<std::pair<NodeId, NodeId>> seen;
  for (Link& l : links_) {
    const int n = static_cast<int>(nodes_.size());
    if (l.src < 0 || l.src >= n || l.dst < 0 || l.dst >= n) {
      throw ModelError("link " + std::to_string(l.id) + " has a dangling endpoint");
    }
    if (l.src == l.dst) throw ModelError("link " + std::to_string(l.id) + " is a self loop");
    if (!(l.capacity_max > 0.0)) {
      throw ModelError("link " + std::to_string(l.id) + " has non-positive capacity");
    }
    if (!(l.prop_delay >= 0.0)) {
      throw ModelError("link " + std::to_string(l.id) + " has negative delay");
    }
    if (!seen.insert({l.src, l.dst}).second) {
      throw ModelError("duplicate link " + std::to_string(l.src) + "->" + std::to_string(l.dst));
    }
    if (nodes_[l.src].is_cloud || nodes_[l.dst].is_cloud) l.capacity_max = kInfiniteCapacity;
    out_links_[l.src].push_back(l.id);
  }
}

LinkId NetworkModel::find_link(NodeId src, NodeId dst) const {
  for (LinkId l : out_links_.at(src)) {
    if (links_[l].dst == dst) return l;
  }
  return kNone;
}

const std::vector<PathId>& NetworkModel::sfc_paths(NodeId src, NodeId dst) const {
  auto it = catalog_.sfc_paths.find({src, dst});
  if (it == catalog_.sfc_paths.end()) throw UnreachableError(src, dst);
  return it->second;
}

bool NetworkModel::link_touches_cloud(LinkId id) const {
  const Link& l = links_.at(id);
  return nodes_[l.src].is_cloud || nodes_[l.dst].is_cloud;
}

std::vector<NodeId> NetworkModel::edge_nodes() const {
  std::vector<NodeId> out;
  for (const Node& n : nodes_) {
    if (!n.is_cloud) out.push_back(n.id);
  }
  return out;
}

double haversine_delay(GeoPoint a, GeoPoint b) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double phi1 = a.lat * deg;
  const double phi2 = b.lat * deg;
  const double dphi = (b.lat - a.lat) * deg;
  const double dlambda = (b.lon - a.lon) * deg;
  const double h = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
  const double km = 2.0 * kEarthRadiusKm * std::asin(std::sqrt(std::min(1.0, h)));
  return km / kFiberSpeedKmPerMs;
}

Path make_path(const NetworkModel& model, PathId id, const std::vector<LinkId>& links) {
  if (links.empty()) throw ModelError("path needs at least one link");
  Path p;
  p.id = id;
  p.links = links;
  p.nodes = links_nodes(model, model.link(links.front()).src, links);
  for (std::size_t i = 1; i < links.size(); ++i) {
    if (model.link(links[i - 1]).dst != model.link(links[i]).src) {
      throw ModelError("path links are not consecutive");
    }
  }
  p.total_prop_delay = links_delay(model, links);
  for (NodeId n : p.nodes) {
    if (model.node(n).is_cloud) p.traverses_cloud = true;
    for (ServerId s : model.servers_at(n)) p.servers.push_back(s);
  }
  return p;
}

std::vector<std::vector<LinkId>> k_shortest_paths(const NetworkModel& model, NodeId src,
                                                  NodeId dst, int k,
                                                  const std::vector<bool>& banned) {
  std::vector<Candidate> accepted;
  if (k <= 0 || src == dst) return {};
  auto first = shortest_path(model, src, dst, banned, {});
  if (!first) return {};
  accepted.push_back({links_delay(model, *first), links_nodes(model, src, *first), *first});
  std::set<Candidate> pending;

  while (static_cast<int>(accepted.size()) < k) {
    const Candidate& prev = accepted.back();
    for (std::size_t i = 0; i + 1 < prev.nodes.size(); ++i) {
      const NodeId spur = prev.nodes[i];
      const std::vector<NodeId> root(prev.nodes.begin(), prev.nodes.begin() + i + 1);
      const std::vector<LinkId> root_links(prev.links.begin(), prev.links.begin() + i);
      std::set<LinkId> removed;
      for (const Candidate& a : accepted) {
        if (a.nodes.size() > i + 1 && std::equal(root.begin(), root.end(), a.nodes.begin())) {
          removed.insert(a.links[i]);
        }
      }
      std::vector<bool> ban = banned;
      for (std::size_t j = 0; j < i; ++j) ban[root[j]] = true;
      auto spur_path = shortest_path(model, spur, dst, ban, removed);
      if (!spur_path) continue;
      std::vector<LinkId> links = root_links;
      links.insert(links.end(), spur_path->begin(), spur_path->end());
      Candidate c{links_delay(model, links), links_nodes(model, src, links), links};
      const bool known = std::any_of(accepted.begin(), accepted.end(),
                                     [&](const Candidate& a) { return a.nodes == c.nodes; });
      if (!known) pending.insert(std::move(c));
    }
    if (pending.empty()) break;
    accepted.push_back(*pending.begin());
    pending.erase(pending.begin());
  }

  std::vector<std::vector<LinkId>> out;
  for (const Candidate& c : accepted) out.push_back(c.links);
  return out;
}

PathCatalog build_path_catalog(const NetworkModel& model, const CatalogOptions& options) {
  PathCatalog cat;
  cat.options = options;
  std::map<std::vector<NodeId>, PathId> by_nodes;
  auto intern = [&](const std::vector<LinkId>& links) {
    const auto nodes = links_nodes(model, model.link(links.front()).src, links);
    auto it = by_nodes.find(nodes);
    if (it != by_nodes.end()) return it->second;
    const PathId id = static_cast<PathId>(cat.paths.size());
    cat.paths.push_back(make_path(model, id, links));
    by_nodes.emplace(nodes, id);
    return id;
  };

  const std::size_t n = model.nodes().size();
  std::vector<bool> cloud(n, false);
  for (const Node& node : model.nodes()) cloud[node.id] = node.is_cloud;
  const bool has_cloud = std::find(cloud.begin(), cloud.end(), true) != cloud.end();

  for (const Node& a : model.nodes()) {
    if (a.is_cloud) continue;
    for (const Node& b : model.nodes()) {
      if (b.is_cloud || a.id == b.id) continue;
      std::vector<Candidate> found;
      for (const auto& links : k_shortest_paths(model, a.id, b.id, options.k_edge, cloud)) {
        found.push_back({links_delay(model, links), links_nodes(model, a.id, links), links});
      }
      if (options.include_cloud_path && has_cloud) {
        if (auto c = cloud_path(model, a.id, b.id)) found.push_back(std::move(*c));
      }
      if (found.empty()) continue;  // sfc_paths() reports the pair when asked
      std::sort(found.begin(), found.end());
      auto& ids = cat.sfc_paths[{a.id, b.id}];
      for (const Candidate& c : found) ids.push_back(intern(c.links));
    }
  }

  const std::vector<bool> none(n, false);
  for (const Node& a : model.nodes()) {
    if (model.servers_at(a.id).empty()) continue;
    for (const Node& b : model.nodes()) {
      if (a.id == b.id || model.servers_at(b.id).empty()) continue;
      auto paths = k_shortest_paths(model, a.id, b.id, options.k_sync, none);
      if (paths.empty()) continue;
      auto& ids = cat.sync_paths[{a.id, b.id}];
      for (const auto& links : paths) ids.push_back(intern(links));
    }
  }
  return cat;
}

const std::vector<PathId>& sync_paths_between(const NetworkModel& model, NodeId n, NodeId m) {
  if (n == m) throw std::invalid_argument("sync paths need distinct endpoints");
  auto it = model.catalog().sync_paths.find({n, m});
  if (it == model.catalog().sync_paths.end() || it->second.empty()) throw UnreachableError(n, m);
  return it->second;
}

NetworkModel load_topology(std::istream& in, const CatalogOptions& options) {
  enum class Section { None, Nodes, Servers, Links };
  Section section = Section::None;
  std::vector<Node> nodes;
  std::vector<Server> servers;
  struct RawLink {
    NodeId src, dst;
    double capacity;
    std::optional<double> delay;
    int line;
  };
  std::vector<RawLink> raw_links;
  std::vector<std::optional<bool>> server_cloud;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == "[nodes]") {
      section = Section::Nodes;
      continue;
    }
    if (tok[0] == "[servers]") {
      section = Section::Servers;
      continue;
    }
    if (tok[0] == "[links]") {
      section = Section::Links;
      continue;
    }
    if (tok[0].front() == '[') {
      throw ParseError("line " + std::to_string(line_no) + ": unknown section " + tok[0]);
    }
    auto opt = [&](std::size_t i) -> std::optional<double> {
      if (i >= tok.size() || is_placeholder(tok[i])) return std::nullopt;
      return parse_number(tok[i], line_no);
    };
    switch (section) {
      case Section::None:
        throw ParseError("line " + std::to_string(line_no) + ": data outside a section");
      case Section::Nodes: {
        Node node;
        node.id = parse_int(tok[0], line_no);
        auto lat = opt(1), lon = opt(2);
        if (lat.has_value() != lon.has_value()) {
          throw ParseError("line " + std::to_string(line_no) + ": lat and lon go together");
        }
        if (lat) {
          if (std::abs(*lat) > 90.0 || std::abs(*lon) > 180.0) {
            throw ParseError("line " + std::to_string(line_no) + ": coordinates out of range");
          }
          node.location = GeoPoint{*lat, *lon};
        }
        node.is_cloud = opt(3).value_or(0.0) != 0.0;
        if (tok.size() > 4) node.name = tok[4];
        nodes.push_back(node);
        break;
      }
      case Section::Servers: {
        if (tok.size() < 3) throw ParseError("line " + std::to_string(line_no) + ": server needs id node capacity");
        Server s;
        s.id = parse_int(tok[0], line_no);
        s.node = parse_int(tok[1], line_no);
        s.capacity_max = parse_number(tok[2], line_no);
        auto cl = opt(3);
        server_cloud.resize(std::max<std::size_t>(server_cloud.size(), s.id + 1));
        if (s.id >= 0 && cl) server_cloud[s.id] = *cl != 0.0;
        s.idle_energy_cost = opt(4).value_or(kDefaultIdleEnergyCost);
        s.utilization_cost_slope = opt(5).value_or(kDefaultUtilizationCostSlope);
        s.fixed_maintenance_cost = opt(6).value_or(0.0);
        servers.push_back(s);
        break;
      }
      case Section::Links: {
        if (tok.size() < 3) throw ParseError("line " + std::to_string(line_no) + ": link needs src dst capacity");
        raw_links.push_back({parse_int(tok[0], line_no), parse_int(tok[1], line_no),
                             parse_number(tok[2], line_no), opt(3), line_no});
        break;
      }
    }
  }

  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  std::sort(servers.begin(), servers.end(), [](const Server& a, const Server& b) { return a.id < b.id; });
  check_contiguous(nodes, "node");
  check_contiguous(servers, "server");
  for (Server& s : servers) {
    if (s.node < 0 || s.node >= static_cast<int>(nodes.size())) {
      throw ModelError("server " + std::to_string(s.id) + " references unknown node " + std::to_string(s.node));
    }
    const auto& cl = s.id < static_cast<int>(server_cloud.size()) ? server_cloud[s.id] : std::nullopt;
    s.is_cloud = cl.value_or(nodes[s.node].is_cloud);
  }

  std::vector<Link> links;
  for (const RawLink& r : raw_links) {
    Link l;
    l.id = static_cast<LinkId>(links.size());
    l.src = r.src;
    l.dst = r.dst;
    l.capacity_max = r.capacity;
    const int n = static_cast<int>(nodes.size());
    if (r.src < 0 || r.src >= n || r.dst < 0 || r.dst >= n) {
      throw ModelError("line " + std::to_string(r.line) + ": link endpoint does not exist");
    }
    if (r.delay) {
      l.prop_delay = *r.delay;
    } else {
      if (!nodes[r.src].location || !nodes[r.dst].location) {
        throw ModelError("line " + std::to_string(r.line) +
                         ": link has no delay and its endpoints lack coordinates");
      }
      l.prop_delay = haversine_delay(require_location(nodes[r.src]), require_location(nodes[r.dst]));
    }
    links.push_back(l);
  }

  NetworkModel model(std::move(nodes), std::move(servers), std::move(links));
  model.set_catalog(build_path_catalog(model, options));
  return model;
}

NetworkModel load_topology_file(const std::string& path, const CatalogOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open topology file " + path);
  return load_topology(in, options);
}

}  // namespace sfcplace
