#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "cpepc/community.hpp"
#include "oracles.hpp"

using namespace cpepc;

namespace {

const std::filesystem::path kData = CPEPC_DATA_DIR;

NetworkGraph routers_graph(std::vector<std::string> names, std::vector<std::pair<std::string, std::string>> links) {
  std::vector<NetworkGraph::NodeSpec> nodes;
  for (auto& n : names) nodes.push_back({n, NodeRole::kRouter});
  std::vector<NetworkGraph::EdgeSpec> edges;
  for (auto& [a, b] : links) edges.push_back({a, b, 1.0});
  return NetworkGraph(std::move(nodes), std::move(edges));
}

WeightedGraph complete(std::uint32_t n) {
  WeightedGraph g;
  g.adjacency.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) {
      if (i != j) g.adjacency[i].push_back({j, 1.0});
    }
  }
  return g;
}

std::size_t label_count(const std::vector<std::uint32_t>& labels) {
  return std::set<std::uint32_t>(labels.begin(), labels.end()).size();
}

}  // namespace

TEST(Community, CountFromTau) {
  EXPECT_EQ(community_count(0.15, 161), 25u);
  EXPECT_EQ(community_count(0.15, 282), 43u);
  EXPECT_EQ(community_count(1.0, 7), 7u);
  EXPECT_THROW(community_count(0.0, 10), std::invalid_argument);
}

TEST(Community, ModularityExamples) {
  const auto k5 = complete(5);
  const std::vector<std::uint32_t> one(5, 0);
  EXPECT_NEAR(modularity(k5, one), 0.0, 1e-12);

  WeightedGraph triangles;
  triangles.adjacency.resize(6);
  for (std::uint32_t base : {0u, 3u}) {
    for (std::uint32_t i = 0; i < 3; ++i) {
      for (std::uint32_t j = 0; j < 3; ++j) {
        if (i != j) triangles.adjacency[base + i].push_back({base + j, 1.0});
      }
    }
  }
  const std::vector<std::uint32_t> split{0, 0, 0, 1, 1, 1};
  EXPECT_NEAR(modularity(triangles, split), 0.5, 1e-12);

  WeightedGraph empty;
  empty.adjacency.resize(3);
  EXPECT_THROW(modularity(empty, std::vector<std::uint32_t>{0, 1, 2}), std::invalid_argument);
}

TEST(Community, ModularityMatchesPerCommunityForm) {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = oracle::router_subgraph(oracle::random_connected_graph(rng, 2 + rng.below(7)));
    std::vector<std::uint32_t> labels(g.size());
    for (auto& l : labels) l = static_cast<std::uint32_t>(rng.below(3));
    // relabel contiguously for the oracle
    std::map<std::uint32_t, std::uint32_t> remap;
    for (auto& l : labels) l = remap.emplace(l, static_cast<std::uint32_t>(remap.size())).first->second;
    for (double gamma : {0.5, 1.0, 2.0}) {
      EXPECT_NEAR(modularity(g, labels, gamma), oracle::modularity_by_communities(g, labels, gamma), 1e-12);
    }
  }
}

TEST(Community, LouvainTwoCliquesIsOptimal) {
  const auto g = oracle::two_cliques();
  std::vector<std::uint32_t> best;
  const double q_best = oracle::brute_best_modularity(g, &best);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto labels = louvain(g, 1.0, seed);
    EXPECT_EQ(label_count(labels), 2u);
    for (std::uint32_t i = 1; i < 4; ++i) EXPECT_EQ(labels[i], labels[0]);
    for (std::uint32_t i = 5; i < 8; ++i) EXPECT_EQ(labels[i], labels[4]);
    EXPECT_NEAR(modularity(g, labels), q_best, 1e-12);
  }
}

TEST(Community, LouvainCompleteGraphIsOneCommunity) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) EXPECT_EQ(label_count(louvain(complete(5), 1.0, seed)), 1u);
}

TEST(Community, LouvainNearOptimalOnSmallGraphs) {
  Rng rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = oracle::router_subgraph(oracle::random_connected_graph(rng, 2 + rng.below(7)));
    const auto labels = louvain(g, 1.0, trial + 1);
    const double q = modularity(g, labels);
    const double q_best = oracle::brute_best_modularity(g);
    std::vector<std::uint32_t> singletons(g.size());
    std::iota(singletons.begin(), singletons.end(), 0u);
    EXPECT_GE(q + 1e-12, modularity(g, singletons));
    if (q_best > 0) {
      EXPECT_GE(q, 0.9 * q_best - 1e-12) << "trial " << trial;
    }
  }
}

TEST(Community, BetweennessExamples) {
  const auto path = routers_graph({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
  EXPECT_EQ(betweenness_centrality(oracle::router_subgraph(path)), (std::vector<double>{0, 1, 0}));

  const auto star = routers_graph({"h", "x", "y", "z"}, {{"h", "x"}, {"h", "y"}, {"h", "z"}});
  EXPECT_EQ(betweenness_centrality(oracle::router_subgraph(star))[0], 3.0);

  for (double v : betweenness_centrality(complete(6))) EXPECT_EQ(v, 0.0);
}

TEST(Community, BetweennessMatchesBruteForce) {
  Rng rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = oracle::router_subgraph(oracle::random_connected_graph(rng, 2 + rng.below(7)));
    const auto fast = betweenness_centrality(g);
    const auto slow = oracle::brute_betweenness(g);
    ASSERT_EQ(fast.size(), slow.size());
    for (std::size_t v = 0; v < fast.size(); ++v) ASSERT_NEAR(fast[v], slow[v], 1e-9) << "trial " << trial;
  }
}

TEST(Community, LeaderTieBreaks) {
  const auto star = routers_graph({"a", "hub", "x", "y"}, {{"hub", "a"}, {"hub", "x"}, {"hub", "y"}});
  const auto all = star.routers();
  EXPECT_EQ(star.id(select_leader(star, all)), "hub");

  const auto path = routers_graph({"p", "q", "r"}, {{"p", "q"}, {"q", "r"}});
  EXPECT_EQ(path.id(select_leader(path, path.routers())), "q");

  const auto cycle = routers_graph({"w", "x", "y", "z"}, {{"w", "x"}, {"x", "y"}, {"y", "z"}, {"z", "w"}});
  EXPECT_EQ(cycle.id(select_leader(cycle, cycle.routers())), "w");

  // a-b-c-d with leaves e on b and f on c: b and c mirror each other
  const auto sym = routers_graph({"a", "b", "c", "d", "e", "f"},
                                 {{"a", "b"}, {"b", "c"}, {"c", "d"}, {"b", "e"}, {"c", "f"}});
  EXPECT_EQ(sym.id(select_leader(sym, sym.routers())), "b");
}

TEST(Community, LeaderAverageDistanceBreaksBetweennessTie) {
  // BC(n1) = BC(n2) = 5.5; n2 reaches the others in 7/6 hops on average, n1 in 8/6.
  const auto g = routers_graph({"n0", "n1", "n2", "n3", "n4", "n5", "n6"},
                               {{"n0", "n1"}, {"n0", "n2"}, {"n0", "n6"}, {"n1", "n2"}, {"n1", "n3"},
                                {"n1", "n4"}, {"n2", "n4"}, {"n2", "n5"}, {"n2", "n6"}, {"n4", "n5"}});
  const auto bc = betweenness_centrality(oracle::router_subgraph(g));
  EXPECT_DOUBLE_EQ(bc[1], 5.5);
  EXPECT_DOUBLE_EQ(bc[2], 5.5);
  EXPECT_EQ(g.id(select_leader(g, g.routers())), "n2");
}

TEST(Community, DetectOnExodus) {
  const auto g = load_topology(kData / "topologies" / "exodus.json");
  const auto a = detect_communities(g, CommunityParams{}, 1);
  EXPECT_EQ(a.target_count, 25u);
  EXPECT_LE(std::abs(static_cast<long>(a.size()) - 25), 2);

  // structure: cover, disjoint, leaders inside, endpoints follow their router
  std::set<NodeIndex> seen;
  for (CommunityId c = 0; c < a.size(); ++c) {
    const auto& members = a.communities[c];
    EXPECT_FALSE(members.empty());
    EXPECT_NE(std::find(members.begin(), members.end(), a.leaders[c]), members.end());
    for (auto v : members) {
      EXPECT_TRUE(seen.insert(v).second);
      EXPECT_EQ(a.community_of(v), c);
    }
  }
  EXPECT_EQ(seen.size(), g.routers().size());
  EXPECT_EQ(a.membership.size(), g.node_count());
  for (auto v : g.consumers()) EXPECT_EQ(a.community_of(v), a.community_of(g.attached_router(v)));

  const auto again = detect_communities(g, CommunityParams{}, 1);
  EXPECT_EQ(again.membership, a.membership);
  EXPECT_EQ(again.leaders, a.leaders);
}

TEST(Community, TargetCountOverride) {
  const auto g = load_topology(kData / "topologies" / "exodus.json");
  CommunityParams p;
  p.target_count = 10;
  const auto a = detect_communities(g, p, 5);
  EXPECT_EQ(a.target_count, 10u);
  EXPECT_LE(std::abs(static_cast<long>(a.size()) - 10), 2);
}
