#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpepc/types.hpp"

namespace cpepc {

enum class NodeRole { kConsumer, kRouter, kSource };

std::string_view to_string(NodeRole role);
NodeRole parse_role(std::string_view text);

struct Edge {
  NodeIndex a;
  NodeIndex b;
  double delay_ms;
};

struct Neighbor {
  NodeIndex node;
  double delay_ms;
};

/// Undirected, delay-weighted network of consumers, routers and sources.
///
/// Node indices follow lexicographic order of the string ids, so every
/// index-based tie-break in routing and leader election is also an id-based
/// one. Instances are immutable once constructed.
class NetworkGraph {
 public:
  struct NodeSpec {
    std::string id;
    NodeRole role;
  };
  struct EdgeSpec {
    std::string a;
    std::string b;
    double delay_ms;
  };

  NetworkGraph() = default;

  /// Builds and validates a graph. Throws ValidationError on duplicate ids,
  /// unknown endpoints, self-loops, parallel edges, negative/non-finite delays,
  /// endpoint nodes whose degree is not 1 or that are not attached to a router,
  /// or a disconnected router subgraph.
  NetworkGraph(std::vector<NodeSpec> nodes, std::vector<EdgeSpec> edges);

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::string& id(NodeIndex v) const { return ids_.at(v); }
  NodeRole role(NodeIndex v) const { return roles_.at(v); }
  bool is_router(NodeIndex v) const { return roles_.at(v) == NodeRole::kRouter; }
  std::optional<NodeIndex> find(std::string_view id) const;
  NodeIndex index_of(std::string_view id) const;

  const std::vector<Neighbor>& neighbors(NodeIndex v) const { return adjacency_.at(v); }
  std::size_t degree(NodeIndex v) const { return adjacency_.at(v).size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::optional<double> edge_delay(NodeIndex a, NodeIndex b) const;

  std::vector<NodeIndex> nodes_with_role(NodeRole role) const;
  std::vector<NodeIndex> routers() const { return nodes_with_role(NodeRole::kRouter); }
  std::vector<NodeIndex> consumers() const { return nodes_with_role(NodeRole::kConsumer); }
  std::vector<NodeIndex> sources() const { return nodes_with_role(NodeRole::kSource); }

  /// Router an artificial (consumer/source) node hangs off; a router maps to itself.
  NodeIndex attached_router(NodeIndex v) const;

  std::vector<NodeSpec> node_specs() const;
  std::vector<EdgeSpec> edge_specs() const;

  friend bool operator==(const NetworkGraph& lhs, const NetworkGraph& rhs);

 private:
  std::vector<std::string> ids_;
  std::vector<NodeRole> roles_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

NetworkGraph parse_topology(std::string_view json_text);
NetworkGraph load_topology(const std::filesystem::path& path);
std::string serialize_topology(const NetworkGraph& g);

/// Adds one consumer per router and floor(source_fraction * routers) sources
/// (at least one) on the highest-degree routers; all new links have delay 0.
/// Consumers are named "c<suffix>" after their router, sources "s<k>".
NetworkGraph attach_endpoints(const NetworkGraph& g, double source_fraction);

/// attach_endpoints applied only when the document has no consumers.
NetworkGraph with_endpoints(const NetworkGraph& g, double source_fraction = 0.05);

struct RoutePath {
  std::vector<NodeIndex> nodes;
  double total_delay_ms = 0.0;
  std::size_t hop_count = 0;

  friend bool operator==(const RoutePath&, const RoutePath&) = default;
};

/// Minimum-delay path; ties go to fewer hops, then the lexicographically
/// smallest node sequence. Throws std::out_of_range for unknown nodes and
/// ValidationError when dst is unreachable.
RoutePath shortest_path(const NetworkGraph& g, NodeIndex src, NodeIndex dst);

/// Precomputed next-hop table (the FIB abstraction).
class RouteTable {
 public:
  explicit RouteTable(const NetworkGraph& g);

  std::size_t node_count() const { return n_; }
  /// Number of ordered (u, v) pairs with u != v that are reachable.
  std::size_t entry_count() const;

  NodeIndex next_hop(NodeIndex from, NodeIndex to) const { return next_[from * n_ + to]; }
  double delay(NodeIndex from, NodeIndex to) const { return delay_[from * n_ + to]; }
  std::size_t hops(NodeIndex from, NodeIndex to) const { return hops_[from * n_ + to]; }
  bool reachable(NodeIndex from, NodeIndex to) const { return next_[from * n_ + to] != kNoNode; }

  /// Path obtained by chaining next hops; equals shortest_path(from, to).
  RoutePath path(NodeIndex from, NodeIndex to) const;

 private:
  std::size_t n_ = 0;
  std::vector<NodeIndex> next_;
  std::vector<double> delay_;
  std::vector<std::size_t> hops_;
};

}  // namespace cpepc
