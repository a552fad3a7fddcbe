#include "cpepc/community.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "cpepc/rng.hpp"

namespace cpepc {

double WeightedGraph::total_weight() const {
  double twice = 0.0;
  for (std::uint32_t i = 0; i < adjacency.size(); ++i) {
    for (const auto& a : adjacency[i]) twice += (a.to == i) ? 2.0 * a.weight : a.weight;
  }
  return twice / 2.0;
}

WeightedGraph induced_subgraph(const NetworkGraph& g, std::span<const NodeIndex> nodes) {
  std::map<NodeIndex, std::uint32_t> local;
  for (std::uint32_t i = 0; i < nodes.size(); ++i) local.emplace(nodes[i], i);
  WeightedGraph out;
  out.adjacency.resize(nodes.size());
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    for (const auto& nb : g.neighbors(nodes[i])) {
      if (auto it = local.find(nb.node); it != local.end()) out.adjacency[i].push_back({it->second, 1.0});
    }
  }
  return out;
}

std::size_t community_count(double tau, std::size_t node_count) {
  if (!(tau > 0.0) || node_count == 0) throw std::invalid_argument("community_count needs tau > 0 and nodes > 0");
  // guard against 0.15 * 161 = 24.150000000000002 style noise pushing ceil up
  const double raw = tau * static_cast<double>(node_count);
  const double nearest = std::round(raw);
  if (std::abs(raw - nearest) < 1e-9) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(raw));
}

namespace {

std::vector<double> degrees(const WeightedGraph& g) {
  std::vector<double> k(g.size(), 0.0);
  for (std::uint32_t i = 0; i < g.size(); ++i) {
    for (const auto& a : g.adjacency[i]) k[i] += (a.to == i) ? 2.0 * a.weight : a.weight;
  }
  return k;
}

}  // namespace

double modularity(const WeightedGraph& g, std::span<const std::uint32_t> membership, double resolution) {
  if (membership.size() != g.size()) throw std::invalid_argument("membership does not cover the graph");
  const double m = g.total_weight();
  if (m <= 0.0) throw std::invalid_argument("modularity is undefined on an edgeless graph");
  const std::uint32_t labels = membership.empty() ? 0 : *std::max_element(membership.begin(), membership.end()) + 1;
  std::vector<double> inside(labels, 0.0);
  std::vector<double> total(labels, 0.0);
  const auto k = degrees(g);
  for (std::uint32_t i = 0; i < g.size(); ++i) {
    total[membership[i]] += k[i];
    for (const auto& a : g.adjacency[i]) {
      if (a.to == i) {
        inside[membership[i]] += a.weight;
      } else if (a.to > i && membership[a.to] == membership[i]) {
        inside[membership[i]] += a.weight;
      }
    }
  }
  double q = 0.0;
  for (std::uint32_t c = 0; c < labels; ++c) {
    const double frac = total[c] / (2.0 * m);
    q += inside[c] / m - resolution * frac * frac;
  }
  return q;
}

namespace {

// Local moving phase. Returns true if any node changed community.
bool move_nodes(const WeightedGraph& g, const std::vector<double>& k, double m2, double resolution,
                std::vector<std::uint32_t>& comm, Rng& rng) {
  const std::size_t n = g.size();
  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) tot[comm[i]] += k[i];

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);  // Fisher-Yates

  std::vector<double> link(n, 0.0);
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> touched;
  bool any_move = false;
  constexpr int kMaxPasses = 1000;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool moved = false;
    for (const std::uint32_t i : order) {
      const std::uint32_t old_c = comm[i];
      touched.clear();
      touched.push_back(old_c);
      seen[old_c] = 1;
      for (const auto& a : g.adjacency[i]) {
        if (a.to == i) continue;
        const std::uint32_t c = comm[a.to];
        if (!seen[c]) {
          seen[c] = 1;
          touched.push_back(c);
        }
        link[c] += a.weight;
      }
      tot[old_c] -= k[i];
      auto gain = [&](std::uint32_t c) { return link[c] - resolution * tot[c] * k[i] / m2; };
      std::uint32_t best = old_c;
      double best_gain = gain(old_c);
      for (const std::uint32_t c : touched) {
        const double gc = gain(c);
        if (gc > best_gain + 1e-12) {
          best = c;
          best_gain = gc;
        }
      }
      tot[best] += k[i];
      comm[i] = best;
      if (best != old_c) moved = true;
      for (const std::uint32_t c : touched) {
        link[c] = 0.0;
        seen[c] = 0;
      }
    }
    if (!moved) break;
    any_move = true;
  }
  return any_move;
}

std::vector<std::uint32_t> renumber(std::vector<std::uint32_t> labels) {
  std::map<std::uint32_t, std::uint32_t> remap;
  for (auto& l : labels) {
    auto [it, fresh] = remap.emplace(l, static_cast<std::uint32_t>(remap.size()));
    l = it->second;
  }
  return labels;
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::uint32_t>& comm, std::uint32_t count) {
  std::vector<std::map<std::uint32_t, double>> acc(count);
  for (std::uint32_t i = 0; i < g.size(); ++i) {
    for (const auto& a : g.adjacency[i]) {
      const std::uint32_t ci = comm[i];
      const std::uint32_t cj = comm[a.to];
      if (a.to == i) {
        acc[ci][ci] += a.weight;
      } else if (i < a.to) {
        if (ci == cj) {
          acc[ci][ci] += a.weight;
        } else {
          acc[ci][cj] += a.weight;
          acc[cj][ci] += a.weight;
        }
      }
    }
  }
  WeightedGraph out;
  out.adjacency.resize(count);
  for (std::uint32_t c = 0; c < count; ++c) {
    for (const auto& [d, w] : acc[c]) out.adjacency[c].push_back({d, w});
  }
  return out;
}

}  // namespace

namespace {

// Multi-level passes starting from the partition `membership` of g.
void coarsen(const WeightedGraph& g, double m2, double resolution, std::vector<std::uint32_t>& membership, Rng& rng) {
  const std::uint32_t start = static_cast<std::uint32_t>(*std::max_element(membership.begin(), membership.end()) + 1);
  WeightedGraph level = start == g.size() ? g : aggregate(g, membership, start);
  for (;;) {
    const auto k = degrees(level);
    std::vector<std::uint32_t> comm(level.size());
    std::iota(comm.begin(), comm.end(), 0u);
    if (!move_nodes(level, k, m2, resolution, comm, rng)) break;
    comm = renumber(std::move(comm));
    const std::uint32_t count = *std::max_element(comm.begin(), comm.end()) + 1;
    for (auto& l : membership) l = comm[l];
    if (count == level.size()) break;
    level = aggregate(level, comm, count);
  }
  membership = renumber(std::move(membership));
}

std::vector<std::uint32_t> louvain_once(const WeightedGraph& g, double resolution, std::uint64_t seed) {
  std::vector<std::uint32_t> membership(g.size());
  std::iota(membership.begin(), membership.end(), 0u);
  if (g.size() == 0) return membership;
  const double m = g.total_weight();
  if (m <= 0.0) return membership;

  Rng rng(seed);
  const auto k = degrees(g);
  // Aggregation freezes node placement; once the hierarchy settles, let single
  // nodes move again on the original graph and re-coarsen if any did.
  constexpr int kMaxRounds = 32;
  for (int round = 0; round < kMaxRounds; ++round) {
    coarsen(g, 2.0 * m, resolution, membership, rng);
    if (!move_nodes(g, k, 2.0 * m, resolution, membership, rng)) break;
    membership = renumber(std::move(membership));
  }
  return membership;
}

}  // namespace

std::vector<std::uint32_t> louvain(const WeightedGraph& g, double resolution, std::uint64_t seed, unsigned restarts) {
  if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
  if (restarts == 0) throw std::invalid_argument("louvain needs at least one run");
  // A single greedy run can stall well short of the optimum on small sparse
  // graphs; independent sweep orders rarely stall the same way.
  std::vector<std::uint32_t> best;
  double best_q = 0.0;
  for (unsigned r = 0; r < restarts; ++r) {
    auto labels = louvain_once(g, resolution, mix_seed(seed + r));
    if (restarts == 1) return labels;
    const double q = modularity(g, labels, resolution);
    if (best.empty() || q > best_q) {
      best_q = q;
      best = std::move(labels);
    }
  }
  return best;
}

std::vector<double> betweenness_centrality(const WeightedGraph& g) {
  const std::size_t n = g.size();
  if (n == 0) throw std::invalid_argument("betweenness of an empty graph");
  std::vector<double> bc(n, 0.0);
  std::vector<std::vector<std::uint32_t>> preds(n);
  std::vector<double> sigma(n);
  std::vector<long> dist(n);
  std::vector<double> delta(n);
  std::vector<std::uint32_t> stack;
  for (std::uint32_t s = 0; s < n; ++s) {
    for (auto& p : preds) p.clear();
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(delta.begin(), delta.end(), 0.0);
    stack.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    std::deque<std::uint32_t> queue{s};
    while (!queue.empty()) {
      const std::uint32_t v = queue.front();
      queue.pop_front();
      stack.push_back(v);
      for (const auto& a : g.adjacency[v]) {
        const std::uint32_t w = a.to;
        if (w == v) continue;
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    while (!stack.empty()) {
      const std::uint32_t w = stack.back();
      stack.pop_back();
      for (const std::uint32_t v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  for (auto& x : bc) x /= 2.0;  // each unordered pair was visited from both ends
  return bc;
}

namespace {

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

std::vector<double> average_hop_distance(const WeightedGraph& g) {
  const std::size_t n = g.size();
  std::vector<double> avg(n, 0.0);
  if (n < 2) return avg;
  for (std::uint32_t s = 0; s < n; ++s) {
    std::vector<long> dist(n, -1);
    dist[s] = 0;
    std::deque<std::uint32_t> queue{s};
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      for (const auto& a : g.adjacency[v]) {
        if (dist[a.to] < 0) {
          dist[a.to] = dist[v] + 1;
          queue.push_back(a.to);
        }
      }
    }
    double sum = 0.0;
    for (std::uint32_t t = 0; t < n; ++t) {
      if (t == s) continue;
      sum += dist[t] < 0 ? static_cast<double>(n) : static_cast<double>(dist[t]);  // unreachable: worse than any path
    }
    avg[s] = sum / static_cast<double>(n - 1);
  }
  return avg;
}

}  // namespace

NodeIndex select_leader(const NetworkGraph& g, std::span<const NodeIndex> community) {
  if (community.empty()) throw std::invalid_argument("cannot elect a leader of an empty community");
  std::vector<NodeIndex> members(community.begin(), community.end());
  std::sort(members.begin(), members.end());
  const auto sub = induced_subgraph(g, members);
  const auto bc = betweenness_centrality(sub);
  const auto avg = average_hop_distance(sub);
  std::size_t best = 0;
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (nearly_equal(bc[i], bc[best])) {
      if (!nearly_equal(avg[i], avg[best]) && avg[i] < avg[best]) best = i;
    } else if (bc[i] > bc[best]) {
      best = i;
    }
  }
  return members[best];
}

namespace {

std::size_t label_count(const std::vector<std::uint32_t>& labels) {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

}  // namespace

CommunityAssignment detect_communities(const NetworkGraph& g, const CommunityParams& params, std::uint64_t seed) {
  const auto routers = g.routers();
  if (routers.empty()) throw std::invalid_argument("cannot detect communities in a graph without routers");
  const auto sub = induced_subgraph(g, routers);

  CommunityAssignment out;
  out.target_count = params.target_count ? *params.target_count : community_count(params.tau, g.node_count());
  const std::size_t target = std::clamp<std::size_t>(out.target_count, 1, routers.size());

  std::vector<std::uint32_t> labels;
  double resolution = params.resolution;
  if (sub.total_weight() <= 0.0) {
    labels.resize(routers.size());
    std::iota(labels.begin(), labels.end(), 0u);
  } else {
    // Community count grows with resolution but not strictly monotonically;
    // bisect in log space and keep the closest partition seen.
    auto distance = [&](const std::vector<std::uint32_t>& l) {
      const auto c = static_cast<long>(label_count(l));
      return std::abs(c - static_cast<long>(target));
    };
    double lo = 0.1;
    double hi = 10.0;
    labels = louvain(sub, params.resolution, seed);
    long best_distance = distance(labels);
    // returns (communities found - target) for resolution r
    auto consider = [&](double r) {
      auto l = louvain(sub, r, seed);
      const long gap = static_cast<long>(label_count(l)) - static_cast<long>(target);
      if (std::abs(gap) < best_distance) {
        best_distance = std::abs(gap);
        labels = std::move(l);
        resolution = r;
      }
      return gap;
    };
    if (best_distance != 0) consider(lo);
    if (best_distance != 0) consider(hi);
    for (int iter = 0; iter < 30 && best_distance != 0; ++iter) {
      const double mid = std::sqrt(lo * hi);
      const long signed_gap = consider(mid);
      if (signed_gap < 0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  out.resolution = resolution;
  out.modularity_score = sub.total_weight() > 0.0 ? modularity(sub, labels, resolution) : 0.0;

  // communities ordered by their smallest router index
  const std::size_t count = label_count(labels);
  std::vector<std::vector<NodeIndex>> groups(count);
  for (std::size_t i = 0; i < routers.size(); ++i) groups[labels[i]].push_back(routers[i]);
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  out.communities = std::move(groups);
  for (CommunityId c = 0; c < out.communities.size(); ++c) {
    for (const NodeIndex r : out.communities[c]) out.membership[r] = c;
    out.leaders.push_back(select_leader(g, out.communities[c]));
  }
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    if (!g.is_router(v)) out.membership[v] = out.membership.at(g.attached_router(v));
  }
  return out;
}

}  // namespace cpepc
