// Brute-force reference implementations shared by the unit tests and the
// acceptance runner. They trade speed for obviousness and are only meant for
// graphs of a handful of nodes.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "cpepc/community.hpp"
#include "cpepc/rng.hpp"
#include "cpepc/topology.hpp"

namespace oracle {

using cpepc::NetworkGraph;
using cpepc::NodeIndex;

/// Connected router-only graph on n nodes: random spanning tree plus extra
/// edges, integer delays in [1, 4] so equal-delay ties are common.
inline NetworkGraph random_connected_graph(cpepc::Rng& rng, std::size_t n) {
  std::vector<NetworkGraph::NodeSpec> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back({"n" + std::to_string(i), cpepc::NodeRole::kRouter});
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  std::vector<NetworkGraph::EdgeSpec> edges;
  auto add = [&](std::size_t a, std::size_t b) {
    if (a == b || adj[a][b]) return;
    adj[a][b] = adj[b][a] = true;
    edges.push_back({nodes[a].id, nodes[b].id, static_cast<double>(1 + rng.below(4))});
  };
  for (std::size_t i = 1; i < n; ++i) add(i, rng.below(i));
  const std::size_t extra = rng.below(n * (n - 1) / 2 + 1);
  for (std::size_t k = 0; k < extra; ++k) add(rng.below(n), rng.below(n));
  return NetworkGraph(std::move(nodes), std::move(edges));
}

/// Every simple path from src to dst, as node sequences.
inline std::vector<std::vector<NodeIndex>> simple_paths(const cpepc::WeightedGraph& g, NodeIndex src, NodeIndex dst) {
  std::vector<std::vector<NodeIndex>> out;
  std::vector<NodeIndex> path{src};
  std::vector<bool> on(g.size(), false);
  on[src] = true;
  std::function<void(NodeIndex)> dfs = [&](NodeIndex u) {
    if (u == dst) {
      out.push_back(path);
      return;
    }
    for (const auto& arc : g.adjacency[u]) {
      if (on[arc.to]) continue;
      on[arc.to] = true;
      path.push_back(arc.to);
      dfs(arc.to);
      path.pop_back();
      on[arc.to] = false;
    }
  };
  dfs(src);
  return out;
}

/// Minimum total delay over all simple paths (infinity when unreachable).
inline double brute_min_delay(const NetworkGraph& g, NodeIndex src, NodeIndex dst) {
  double best = src == dst ? 0.0 : std::numeric_limits<double>::infinity();
  std::vector<bool> on(g.node_count(), false);
  std::function<void(NodeIndex, double)> dfs = [&](NodeIndex u, double d) {
    if (u == dst) {
      best = std::min(best, d);
      return;
    }
    on[u] = true;
    for (const auto& nb : g.neighbors(u)) {
      if (!on[nb.node]) dfs(nb.node, d + nb.delay_ms);
    }
    on[u] = false;
  };
  if (src != dst) dfs(src, 0.0);
  return best;
}

/// Betweenness by enumerating all simple paths of each unordered pair and
/// keeping the shortest ones.
inline std::vector<double> brute_betweenness(const cpepc::WeightedGraph& g) {
  std::vector<double> bc(g.size(), 0.0);
  for (NodeIndex s = 0; s < g.size(); ++s) {
    for (NodeIndex t = s + 1; t < g.size(); ++t) {
      auto paths = simple_paths(g, s, t);
      if (paths.empty()) continue;
      std::size_t shortest = paths.front().size();
      for (const auto& p : paths) shortest = std::min(shortest, p.size());
      std::vector<double> through(g.size(), 0.0);
      double count = 0;
      for (const auto& p : paths) {
        if (p.size() != shortest) continue;
        ++count;
        for (std::size_t i = 1; i + 1 < p.size(); ++i) through[p[i]] += 1.0;
      }
      for (NodeIndex v = 0; v < g.size(); ++v) bc[v] += through[v] / count;
    }
  }
  return bc;
}

/// Modularity from the textbook per-community form
///   Q = sum_c [ L_c / m - gamma (D_c / 2m)^2 ]
/// with L_c the intra-community edge weight and D_c the community's degree sum.
inline double modularity_by_communities(const cpepc::WeightedGraph& g, const std::vector<std::uint32_t>& label,
                                        double gamma = 1.0) {
  double m = 0.0;
  std::uint32_t k = 0;
  for (const auto l : label) k = std::max(k, l + 1);
  std::vector<double> inside(k, 0.0), degree(k, 0.0);
  for (NodeIndex u = 0; u < g.size(); ++u) {
    for (const auto& arc : g.adjacency[u]) {
      if (arc.to < u) continue;
      m += arc.weight;
      degree[label[u]] += arc.weight;
      degree[label[arc.to]] += arc.weight;
      if (label[u] == label[arc.to]) inside[label[u]] += arc.weight;
    }
  }
  double q = 0.0;
  for (std::uint32_t c = 0; c < k; ++c) q += inside[c] / m - gamma * (degree[c] / (2 * m)) * (degree[c] / (2 * m));
  return q;
}

/// Best modularity over every set partition (restricted growth strings).
inline double brute_best_modularity(const cpepc::WeightedGraph& g, std::vector<std::uint32_t>* best_labels = nullptr) {
  const std::size_t n = g.size();
  std::vector<std::uint32_t> label(n, 0);
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t i, std::uint32_t used) {
    if (i == n) {
      const double q = modularity_by_communities(g, label);
      if (q > best) {
        best = q;
        if (best_labels) *best_labels = label;
      }
      return;
    }
    for (std::uint32_t c = 0; c <= used && c < n; ++c) {
      label[i] = c;
      rec(i + 1, std::max<std::uint32_t>(used, c + 1));
    }
  };
  rec(0, 0);
  return best;
}

/// Two 4-cliques {0..3} and {4..7} joined by the bridge 3-4.
inline cpepc::WeightedGraph two_cliques() {
  cpepc::WeightedGraph g;
  g.adjacency.resize(8);
  auto link = [&](std::uint32_t a, std::uint32_t b) {
    g.adjacency[a].push_back({b, 1.0});
    g.adjacency[b].push_back({a, 1.0});
  };
  for (std::uint32_t base : {0u, 4u}) {
    for (std::uint32_t i = 0; i < 4; ++i) {
      for (std::uint32_t j = i + 1; j < 4; ++j) link(base + i, base + j);
    }
  }
  link(3, 4);
  return g;
}

inline cpepc::WeightedGraph router_subgraph(const NetworkGraph& g) {
  const auto routers = g.routers();
  return cpepc::induced_subgraph(g, routers);
}

}  // namespace oracle
