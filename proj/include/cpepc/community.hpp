#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "cpepc/topology.hpp"
#include "cpepc/types.hpp"

namespace cpepc {

/// Plain undirected multigraph used by the community algorithms. Edge weights
/// are multiplicities (1 for a topology link); self-loops appear after
/// aggregation.
struct WeightedGraph {
  struct Arc {
    std::uint32_t to;
    double weight;
  };
  std::vector<std::vector<Arc>> adjacency;  // self-loop stored once with its full weight

  std::size_t size() const { return adjacency.size(); }
  double total_weight() const;  // m: self-loops count once
};

/// Unit-weight graph over the given nodes of g (induced subgraph); local index
/// i corresponds to nodes[i].
WeightedGraph induced_subgraph(const NetworkGraph& g, std::span<const NodeIndex> nodes);

struct CommunityParams {
  double tau = 0.15;
  double resolution = 1.0;
  /// When set, overrides ceil(tau * V) as the community count to aim for.
  std::optional<std::size_t> target_count;
};

struct CommunityAssignment {
  std::map<NodeIndex, CommunityId> membership;    // every node of the topology
  std::vector<std::vector<NodeIndex>> communities;  // routers only, sorted
  std::vector<NodeIndex> leaders;                   // by community id
  double modularity_score = 0.0;                    // at `resolution`, router subgraph
  double resolution = 1.0;
  std::size_t target_count = 0;

  std::size_t size() const { return communities.size(); }
  CommunityId community_of(NodeIndex v) const { return membership.at(v); }
  NodeIndex leader_of(NodeIndex v) const { return leaders.at(community_of(v)); }
};

/// ceil(tau * node_count).
std::size_t community_count(double tau, std::size_t node_count);

/// Newman modularity with resolution multiplier on the degree term.
/// `membership[i]` is the community label of local node i.
double modularity(const WeightedGraph& g, std::span<const std::uint32_t> membership, double resolution = 1.0);

/// Louvain (local moving + aggregation until no gain) at a fixed resolution.
/// Runs `restarts` times, each with a sweep order shuffled from a seed derived
/// from `seed`, and keeps the highest-modularity result (earliest on ties).
/// Returns contiguous labels numbered by first appearance in node order.
inline constexpr unsigned kLouvainRestarts = 16;
std::vector<std::uint32_t> louvain(const WeightedGraph& g, double resolution, std::uint64_t seed,
                                   unsigned restarts = kLouvainRestarts);

/// Louvain on the router subgraph, with the resolution bisected so that the
/// number of communities lands as close as possible to the target count.
/// Consumers and sources join their router's community; each community gets a
/// leader via select_leader.
CommunityAssignment detect_communities(const NetworkGraph& g, const CommunityParams& params, std::uint64_t seed);

/// Unnormalised betweenness (Brandes) on an unweighted graph, counting each
/// unordered pair once.
std::vector<double> betweenness_centrality(const WeightedGraph& g);

/// Maximum betweenness within the community's induced subgraph; ties go to
/// the smaller average hop distance to the other members, then the smaller id.
NodeIndex select_leader(const NetworkGraph& g, std::span<const NodeIndex> community);

}  // namespace cpepc
