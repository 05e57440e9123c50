#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sfcplace {

using NodeId = int;
using ServerId = int;
using LinkId = int;
using PathId = int;

inline constexpr int kNone = -1;
inline constexpr double kInfiniteCapacity = std::numeric_limits<double>::infinity();

// Default edge-server cost parameters in $/h.
inline constexpr double kDefaultIdleEnergyCost = 0.0184453;
inline constexpr double kDefaultUtilizationCostSlope = 0.0095632;
// Capacity given to cloud servers so they never bind.
inline constexpr double kCloudServerCapacity = 1e9;

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

struct Node {
  NodeId id = kNone;
  std::optional<GeoPoint> location;
  bool is_cloud = false;
  std::string name;
};

struct Server {
  ServerId id = kNone;
  NodeId node = kNone;
  double capacity_max = 0.0;
  bool is_cloud = false;
  double idle_energy_cost = kDefaultIdleEnergyCost;
  double utilization_cost_slope = kDefaultUtilizationCostSlope;
  double fixed_maintenance_cost = 0.0;
};

struct Link {
  LinkId id = kNone;
  NodeId src = kNone;
  NodeId dst = kNone;
  double capacity_max = 0.0;  // kInfiniteCapacity for cloud-incident links
  double prop_delay = 0.0;    // ms

  bool unlimited() const { return capacity_max == kInfiniteCapacity; }
};

struct Path {
  PathId id = kNone;
  std::vector<NodeId> nodes;
  std::vector<LinkId> links;
  std::vector<ServerId> servers;  // all servers of each traversed node, in node order
  double total_prop_delay = 0.0;
  bool traverses_cloud = false;

  NodeId src() const { return nodes.front(); }
  NodeId dst() const { return nodes.back(); }
  // Index of `node` in the node sequence, or kNone.
  int node_position(NodeId node) const;
  bool contains_server(ServerId server) const;
  bool contains_link(LinkId link) const;
};

struct CatalogOptions {
  int k_edge = 3;                  // edge-only shortest paths per (src, dst)
  bool include_cloud_path = true;  // plus one path through a cloud node
  int k_sync = 2;                  // candidate sync paths per ordered node pair

  bool operator==(const CatalogOptions&) const = default;
};

// Admissible paths and sync-path candidates. Paths are stored once and shared
// between the two indices (deduplicated by node sequence).
struct PathCatalog {
  CatalogOptions options;
  std::vector<Path> paths;
  std::map<std::pair<NodeId, NodeId>, std::vector<PathId>> sfc_paths;
  std::map<std::pair<NodeId, NodeId>, std::vector<PathId>> sync_paths;

  bool operator==(const PathCatalog&) const = default;
};

inline bool operator==(const Path& a, const Path& b) {
  return a.id == b.id && a.nodes == b.nodes && a.links == b.links &&
         a.servers == b.servers && a.total_prop_delay == b.total_prop_delay &&
         a.traverses_cloud == b.traverses_cloud;
}

// The physical substrate. Immutable once built; share it as const.
class NetworkModel {
 public:
  NetworkModel() = default;
  NetworkModel(std::vector<Node> nodes, std::vector<Server> servers,
               std::vector<Link> links);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Server>& servers() const { return servers_; }
  const std::vector<Link>& links() const { return links_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  const Server& server(ServerId id) const { return servers_.at(id); }
  const Link& link(LinkId id) const { return links_.at(id); }
  const std::vector<ServerId>& servers_at(NodeId node) const { return servers_at_.at(node); }
  const std::vector<LinkId>& out_links(NodeId node) const { return out_links_.at(node); }
  // Link src -> dst, or kNone.
  LinkId find_link(NodeId src, NodeId dst) const;

  const PathCatalog& catalog() const { return catalog_; }
  const Path& path(PathId id) const { return catalog_.paths.at(id); }
  const std::vector<PathId>& sfc_paths(NodeId src, NodeId dst) const;
  void set_catalog(PathCatalog catalog) { catalog_ = std::move(catalog); }

  bool link_touches_cloud(LinkId id) const;
  std::vector<NodeId> edge_nodes() const;

 private:
  std::vector<Node> nodes_;
  std::vector<Server> servers_;
  std::vector<Link> links_;
  std::vector<std::vector<ServerId>> servers_at_;
  std::vector<std::vector<LinkId>> out_links_;
  PathCatalog catalog_;
};

// Great-circle distance (R = 6371 km) over 2/3 of the speed of light, in ms.
double haversine_delay(GeoPoint a, GeoPoint b);

// Parses a topology document (see README for the grammar) and builds the
// path catalog with `options`.
NetworkModel load_topology(std::istream& in, const CatalogOptions& options = {});
NetworkModel load_topology_file(const std::string& path, const CatalogOptions& options = {});

// Loop-free paths from src to dst in ascending (delay, node sequence) order,
// at most k. Nodes in `banned` are never traversed (endpoints excepted only if
// not banned). Yen's deviation search.
std::vector<std::vector<LinkId>> k_shortest_paths(const NetworkModel& model, NodeId src,
                                                  NodeId dst, int k,
                                                  const std::vector<bool>& banned);

// Builds admissible paths for every ordered pair of non-cloud nodes and sync
// candidates for every ordered pair of server-hosting nodes.
PathCatalog build_path_catalog(const NetworkModel& model, const CatalogOptions& options);

// Candidate sync paths n -> m, shortest delay first.
const std::vector<PathId>& sync_paths_between(const NetworkModel& model, NodeId n, NodeId m);

// Materializes a Path (servers, delay, cloud flag) from a link sequence.
Path make_path(const NetworkModel& model, PathId id, const std::vector<LinkId>& links);

}  // namespace sfcplace
