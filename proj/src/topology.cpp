#include "cpepc/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include <json.hpp>

namespace cpepc {

using nlohmann::json;

std::string_view to_string(NodeRole role) {
  switch (role) {
    case NodeRole::kConsumer:
      return "consumer";
    case NodeRole::kRouter:
      return "router";
    case NodeRole::kSource:
      return "source";
  }
  return "?";
}

NodeRole parse_role(std::string_view text) {
  if (text == "consumer") return NodeRole::kConsumer;
  if (text == "router") return NodeRole::kRouter;
  if (text == "source") return NodeRole::kSource;
  throw ParseError("unknown node role '" + std::string(text) + "'");
}

NetworkGraph::NetworkGraph(std::vector<NodeSpec> nodes, std::vector<EdgeSpec> edges) {
  std::sort(nodes.begin(), nodes.end(), [](const NodeSpec& x, const NodeSpec& y) { return x.id < y.id; });
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i].id == nodes[i - 1].id) throw ValidationError("duplicate node id '" + nodes[i].id + "'");
  }
  ids_.reserve(nodes.size());
  roles_.reserve(nodes.size());
  for (auto& n : nodes) {
    ids_.push_back(std::move(n.id));
    roles_.push_back(n.role);
  }
  adjacency_.resize(ids_.size());

  std::set<std::pair<NodeIndex, NodeIndex>> seen;
  for (const auto& e : edges) {
    const auto a = find(e.a);
    const auto b = find(e.b);
    if (!a || !b) throw ValidationError("edge references unknown node '" + (a ? e.b : e.a) + "'");
    if (*a == *b) throw ValidationError("self-loop on '" + e.a + "'");
    if (!std::isfinite(e.delay_ms) || e.delay_ms < 0.0) {
      throw ValidationError("edge " + e.a + "-" + e.b + " has invalid delay");
    }
    const auto key = std::minmax(*a, *b);
    if (!seen.insert(key).second) throw ValidationError("parallel edge " + e.a + "-" + e.b);
    edges_.push_back({key.first, key.second, e.delay_ms});
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& x, const Edge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  for (const auto& e : edges_) {
    adjacency_[e.a].push_back({e.b, e.delay_ms});
    adjacency_[e.b].push_back({e.a, e.delay_ms});
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end(), [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
  }

  for (NodeIndex v = 0; v < ids_.size(); ++v) {
    if (roles_[v] == NodeRole::kRouter) continue;
    if (adjacency_[v].size() != 1) {
      throw ValidationError(std::string(to_string(roles_[v])) + " '" + ids_[v] + "' must have degree 1");
    }
    if (!is_router(adjacency_[v][0].node)) {
      throw ValidationError(std::string(to_string(roles_[v])) + " '" + ids_[v] + "' must attach to a router");
    }
  }

  const auto rs = routers();
  if (!rs.empty()) {
    std::vector<char> visited(ids_.size(), 0);
    std::vector<NodeIndex> stack{rs.front()};
    visited[rs.front()] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const NodeIndex u = stack.back();
      stack.pop_back();
      for (const auto& nb : adjacency_[u]) {
        if (is_router(nb.node) && !visited[nb.node]) {
          visited[nb.node] = 1;
          ++reached;
          stack.push_back(nb.node);
        }
      }
    }
    if (reached != rs.size()) throw ValidationError("router subgraph is disconnected");
  }
}

std::optional<NodeIndex> NetworkGraph::find(std::string_view id) const {
  const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<NodeIndex>(it - ids_.begin());
}

NodeIndex NetworkGraph::index_of(std::string_view id) const {
  if (auto v = find(id)) return *v;
  throw std::out_of_range("unknown node '" + std::string(id) + "'");
}

std::optional<double> NetworkGraph::edge_delay(NodeIndex a, NodeIndex b) const {
  const auto& adj = adjacency_.at(a);
  const auto it =
      std::lower_bound(adj.begin(), adj.end(), b, [](const Neighbor& n, NodeIndex x) { return n.node < x; });
  if (it == adj.end() || it->node != b) return std::nullopt;
  return it->delay_ms;
}

std::vector<NodeIndex> NetworkGraph::nodes_with_role(NodeRole role) const {
  std::vector<NodeIndex> out;
  for (NodeIndex v = 0; v < roles_.size(); ++v) {
    if (roles_[v] == role) out.push_back(v);
  }
  return out;
}

NodeIndex NetworkGraph::attached_router(NodeIndex v) const {
  if (is_router(v)) return v;
  return adjacency_.at(v).front().node;
}

std::vector<NetworkGraph::NodeSpec> NetworkGraph::node_specs() const {
  std::vector<NodeSpec> out;
  for (NodeIndex v = 0; v < ids_.size(); ++v) out.push_back({ids_[v], roles_[v]});
  return out;
}

std::vector<NetworkGraph::EdgeSpec> NetworkGraph::edge_specs() const {
  std::vector<EdgeSpec> out;
  for (const auto& e : edges_) out.push_back({ids_[e.a], ids_[e.b], e.delay_ms});
  return out;
}

bool operator==(const NetworkGraph& lhs, const NetworkGraph& rhs) {
  if (lhs.ids_ != rhs.ids_ || lhs.roles_ != rhs.roles_ || lhs.edges_.size() != rhs.edges_.size()) return false;
  for (std::size_t i = 0; i < lhs.edges_.size(); ++i) {
    const auto& x = lhs.edges_[i];
    const auto& y = rhs.edges_[i];
    if (x.a != y.a || x.b != y.b || x.delay_ms != y.delay_ms) return false;
  }
  return true;
}

NetworkGraph parse_topology(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed topology document: ") + e.what());
  }
  std::vector<NetworkGraph::NodeSpec> nodes;
  std::vector<NetworkGraph::EdgeSpec> edges;
  try {
    for (const auto& n : doc.at("nodes")) {
      nodes.push_back({n.at("id").get<std::string>(), parse_role(n.at("role").get<std::string>())});
    }
    for (const auto& e : doc.at("edges")) {
      edges.push_back({e.at("a").get<std::string>(), e.at("b").get<std::string>(), e.at("delay_ms").get<double>()});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid topology document: ") + e.what());
  }
  return NetworkGraph(std::move(nodes), std::move(edges));
}

NetworkGraph load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open topology file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_topology(buf.str());
}

std::string serialize_topology(const NetworkGraph& g) {
  json doc;
  doc["nodes"] = json::array();
  doc["edges"] = json::array();
  for (const auto& n : g.node_specs()) doc["nodes"].push_back({{"id", n.id}, {"role", to_string(n.role)}});
  for (const auto& e : g.edge_specs()) doc["edges"].push_back({{"a", e.a}, {"b", e.b}, {"delay_ms", e.delay_ms}});
  return doc.dump(1);
}

NetworkGraph attach_endpoints(const NetworkGraph& g, double source_fraction) {
  if (!(source_fraction > 0.0 && source_fraction <= 1.0)) {
    throw std::invalid_argument("source_fraction must be in (0, 1]");
  }
  if (g.node_count() == 0) throw ValidationError("cannot attach endpoints to an empty graph");
  const auto routers = g.routers();
  if (routers.size() != g.node_count()) throw ValidationError("attach_endpoints expects a router-only graph");

  auto nodes = g.node_specs();
  auto edges = g.edge_specs();
  for (const NodeIndex r : routers) {
    const std::string& rid = g.id(r);
    const std::string cid = "c" + (rid.size() > 1 && rid[0] == 'r' ? rid.substr(1) : rid);
    nodes.push_back({cid, NodeRole::kConsumer});
    edges.push_back({cid, rid, 0.0});
  }
  const auto wanted = static_cast<std::size_t>(std::floor(source_fraction * static_cast<double>(routers.size())));
  const std::size_t n_sources = std::max<std::size_t>(1, wanted);
  auto ranked = routers;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](NodeIndex x, NodeIndex y) { return g.degree(x) > g.degree(y); });
  for (std::size_t k = 0; k < n_sources; ++k) {
    const std::string sid = "s" + std::to_string(k);
    nodes.push_back({sid, NodeRole::kSource});
    edges.push_back({sid, g.id(ranked[k]), 0.0});
  }
  return NetworkGraph(std::move(nodes), std::move(edges));
}

NetworkGraph with_endpoints(const NetworkGraph& g, double source_fraction) {
  if (!g.consumers().empty()) return g;
  return attach_endpoints(g, source_fraction);
}

namespace {

struct Label {
  double delay = 0.0;
  std::size_t hops = 0;
  std::vector<NodeIndex> path;
};

bool better(double d, std::size_t h, const std::vector<NodeIndex>& p, const Label& cur) {
  if (d != cur.delay) return d < cur.delay;
  if (h != cur.hops) return h < cur.hops;
  return p < cur.path;
}

// Single-source search over (delay, hops) keys; hops grow strictly along every
// edge, so zero-delay links are safe. Among equal keys the lexicographically
// smallest sequence wins because every predecessor is settled before v is.
std::vector<std::optional<Label>> dijkstra(const NetworkGraph& g, NodeIndex src) {
  std::vector<std::optional<Label>> label(g.node_count());
  std::vector<char> done(g.node_count(), 0);
  std::set<std::tuple<double, std::size_t, NodeIndex>> frontier;
  label[src] = Label{0.0, 0, {src}};
  frontier.emplace(0.0, 0, src);
  while (!frontier.empty()) {
    const auto [d, h, u] = *frontier.begin();
    frontier.erase(frontier.begin());
    if (done[u]) continue;
    done[u] = 1;
    for (const auto& nb : g.neighbors(u)) {
      if (done[nb.node]) continue;
      const double nd = d + nb.delay_ms;
      const std::size_t nh = h + 1;
      auto np = label[u]->path;
      np.push_back(nb.node);
      auto& cur = label[nb.node];
      if (!cur || better(nd, nh, np, *cur)) {
        if (cur) frontier.erase({cur->delay, cur->hops, nb.node});
        cur = Label{nd, nh, std::move(np)};
        frontier.emplace(nd, nh, nb.node);
      }
    }
  }
  return label;
}

}  // namespace

RoutePath shortest_path(const NetworkGraph& g, NodeIndex src, NodeIndex dst) {
  if (src >= g.node_count() || dst >= g.node_count()) throw std::out_of_range("node index out of range");
  auto labels = dijkstra(g, src);
  if (!labels[dst]) throw ValidationError("no route from '" + g.id(src) + "' to '" + g.id(dst) + "'");
  auto& l = *labels[dst];
  return RoutePath{std::move(l.path), l.delay, l.hops};
}

RouteTable::RouteTable(const NetworkGraph& g)
    : n_(g.node_count()),
      next_(n_ * n_, kNoNode),
      delay_(n_ * n_, 0.0),
      hops_(n_ * n_, 0) {
  for (NodeIndex s = 0; s < n_; ++s) {
    const auto labels = dijkstra(g, s);
    for (NodeIndex t = 0; t < n_; ++t) {
      if (!labels[t]) continue;
      const auto& l = *labels[t];
      next_[s * n_ + t] = l.path.size() > 1 ? l.path[1] : s;
      delay_[s * n_ + t] = l.delay;
      hops_[s * n_ + t] = l.hops;
    }
  }
}

std::size_t RouteTable::entry_count() const {
  std::size_t count = 0;
  for (std::size_t s = 0; s < n_; ++s) {
    for (std::size_t t = 0; t < n_; ++t) {
      if (s != t && next_[s * n_ + t] != kNoNode) ++count;
    }
  }
  return count;
}

RoutePath RouteTable::path(NodeIndex from, NodeIndex to) const {
  if (!reachable(from, to)) throw ValidationError("no route");
  RoutePath out;
  out.nodes.push_back(from);
  NodeIndex cur = from;
  while (cur != to) {
    cur = next_hop(cur, to);
    out.nodes.push_back(cur);
  }
  out.total_delay_ms = delay(from, to);
  out.hop_count = out.nodes.size() - 1;
  return out;
}

}  // namespace cpepc
