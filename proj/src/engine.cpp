#include "cpepc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace cpepc {

std::size_t SimConfig::cache_capacity() const {
  if (cache_slots) return *cache_slots;
  const double slots = cache_fraction_pct / 100.0 * static_cast<double>(catalog_size);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(slots)));
}

Workload SimConfig::workload() const {
  return Workload{catalog_size, alpha, rate, requests, warmup, seed};
}

void SimConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(catalog_size >= 1, "catalog_size must be at least 1");
  require(alpha >= 0.0, "alpha must be non-negative");
  require(rate > 0.0, "rate must be positive");
  require(period_s > 0.0, "period_s must be positive");
  require(tau > 0.0 && tau <= 1.0, "tau must lie in (0, 1]");
  require(rho1 >= 0.0 && rho1 < rho2 && rho2 <= 1.0, "need 0 <= rho1 < rho2 <= 1");
  require(p_max >= 0.0 && p_max <= 1.0, "p_max must lie in [0, 1]");
  require(lambda >= 0.0 && lambda <= 1.0, "lambda must lie in [0, 1]");
  require(omega >= 0.0 && omega <= 1.0, "omega must lie in [0, 1]");
  require(cache_fraction_pct >= 0.0, "cache_fraction must be non-negative");
  require(!community_target || *community_target >= 1, "communities must be at least 1");
  if (strategy.kind == Strategy::kProb) require(strategy.p >= 0.0 && strategy.p <= 1.0, "prob p must lie in [0, 1]");
}

namespace {

std::size_t router_links(const NetworkGraph& g, const std::vector<NodeIndex>& path) {
  std::size_t n = 0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (g.is_router(path[i - 1]) && g.is_router(path[i])) ++n;
  }
  return n;
}

}  // namespace

Simulator::Simulator(std::shared_ptr<const NetworkGraph> graph, std::shared_ptr<const RouteTable> routes,
                     SimConfig config, std::optional<CommunityAssignment> communities)
    : graph_(std::move(graph)),
      routes_(std::move(routes)),
      config_(std::move(config)),
      communities_(std::move(communities)),
      policy_rng_(stream_seed(config_.seed, Stream::kPolicy)),
      replacement_rng_(stream_seed(config_.seed, Stream::kReplacement)) {
  config_.validate();
  const auto& g = *graph_;
  if (routes_->node_count() != g.node_count()) throw ConfigError("route table does not match the topology");
  sources_ = g.sources();
  if (sources_.empty()) throw ConfigError("topology has no source nodes");
  if (g.consumers().empty()) throw ConfigError("topology has no consumer nodes");
  for (const NodeIndex s : sources_) {
    for (const NodeIndex c : g.consumers()) {
      if (!routes_->reachable(c, s)) throw ConfigError("source '" + g.id(s) + "' is unreachable");
    }
  }

  const std::size_t capacity = config_.cache_capacity();
  stores_.resize(g.node_count());
  for (const NodeIndex r : g.routers()) stores_[r].emplace(capacity, config_.replacement, &replacement_rng_);

  switch (config_.strategy.kind) {
    case Strategy::kCpepc: {
      if (!communities_) {
        CommunityParams params;
        params.tau = config_.tau;
        params.target_count = config_.community_target;
        communities_ = detect_communities(g, params, stream_seed(config_.seed, Stream::kCommunity));
      }
      for (CommunityId c = 0; c < communities_->size(); ++c) leader_tables_.emplace_back(communities_->leaders[c]);
      holders_.resize(communities_->size());
      trackers_.assign(g.node_count(), OccupancyTracker(config_.omega));
      red_.assign(g.node_count(),
                  RedState{config_.p_max, 0, compute_thresholds(capacity, config_.rho1, config_.rho2)});
      break;
    }
    case Strategy::kPepc:
      on_path_ = std::make_unique<PepcPolicy>(
          g.node_count(), capacity,
          PepcParams{config_.rho1, config_.rho2, config_.p_max, config_.lambda, config_.omega});
      break;
    case Strategy::kLce:
      on_path_ = std::make_unique<LcePolicy>();
      break;
    case Strategy::kProb:
      on_path_ = std::make_unique<ProbPolicy>(config_.strategy.p, policy_rng_);
      break;
  }
  report_.cache_capacity = capacity;
  if (communities_) {
    report_.achieved_community_count = communities_->size();
    report_.target_community_count = communities_->target_count;
    report_.resolution = communities_->resolution;
  }
}

const ContentStore& Simulator::store(NodeIndex router) const {
  const auto& s = stores_.at(router);
  if (!s) throw std::invalid_argument("node '" + graph_->id(router) + "' has no content store");
  return *s;
}

NodeIndex Simulator::source_for(ContentId name) const {
  if (name < 1) throw std::invalid_argument("content ids start at 1");
  return sources_[(name - 1) % sources_.size()];
}

void Simulator::preload(NodeIndex router, ContentId name) {
  if (!stores_.at(router)) throw std::invalid_argument("preload target is not a router");
  store_at(router, name, nullptr);
}

std::size_t Simulator::count_intra_community_duplicates() const {
  if (!communities_) return 0;
  std::size_t dups = 0;
  for (const auto& members : communities_->communities) {
    std::map<ContentId, int> seen;
    for (const NodeIndex r : members) {
      for (const ContentId name : stores_[r]->contents()) {
        if (++seen[name] == 2) ++dups;
      }
    }
  }
  return dups;
}

bool Simulator::counting(const RequestState& r) const { return r.request.measured; }

MetricsReport Simulator::run() {
  const auto consumers = graph_->consumers();
  return run(generate_requests(config_.workload(), consumers));
}

MetricsReport Simulator::run(std::vector<Request> schedule) {
  if (ran_) throw std::logic_error("a Simulator instance runs once");
  ran_ = true;
  requests_.reserve(schedule.size());
  measure_from_ms_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& req = schedule[i];
    if (req.id != i) throw std::invalid_argument("request ids must be 0..n-1 in order");
    if (!graph_->find(graph_->id(req.consumer)) || graph_->role(req.consumer) != NodeRole::kConsumer) {
      throw std::invalid_argument("request issued by a non-consumer node");
    }
    if (req.name < 1 || req.name > config_.catalog_size) throw std::invalid_argument("content id outside catalog");
    if (req.measured) measure_from_ms_ = std::min(measure_from_ms_, req.time_ms);
    RequestState st;
    st.request = req;
    st.interest.kind = PacketKind::kInterest;
    st.interest.content_name = req.name;
    st.interest.nonce = req.id;
    requests_.push_back(std::move(st));
    queue_.push(req.time_ms, Inject{req.id});
  }
  pending_requests_ = schedule.size();
  const bool periodic = cooperative() || (on_path_ && on_path_->periodic());
  if (periodic && !schedule.empty()) queue_.push(config_.period_s * 1000.0, PeriodTick{});

  while (!queue_.empty()) {
    auto ev = queue_.pop();
    if (ev.time < now_) ++report_.causality_violations;
    now_ = ev.time;
    ++report_.events;
    std::visit([&](const auto& action) { handle(now_, action); }, ev.action);
    if (cooperative() && config_.redundancy_check_interval > 0 &&
        report_.events % config_.redundancy_check_interval == 0) {
      check_redundancy();
    }
  }
  if (pending_requests_ != 0) throw std::logic_error("simulation ended with unsatisfied requests");

  auto& m = report_;
  m.runtime_ms = now_;
  m.message_count = m.interest_hops + m.data_hops + m.control_hops + m.ptable_hops;
  if (m.measured_requests > 0) {
    const auto n = static_cast<double>(m.measured_requests);
    m.cache_hit_ratio = static_cast<double>(m.cache_hits) / n;
    m.avg_latency_ms = m.summed_latency_ms / n;
    m.avg_hit_distance = static_cast<double>(m.summed_hit_distance) / n;
  }
  return m;
}

void Simulator::check_redundancy() {
  ++report_.redundancy_checks;
  report_.redundancy_violations += count_intra_community_duplicates();
}

void Simulator::forward_interest(double now, RequestState& r, NodeIndex from, NodeIndex to) {
  const auto delay = graph_->edge_delay(from, to);
  if (!delay) throw std::logic_error("Interest forwarded across a missing link");
  if (counting(r)) ++report_.interest_hops;
  queue_.push(now + *delay, InterestAt{r.request.id, to});
}

void Simulator::forward_toward_source(double now, RequestState& r, NodeIndex at) {
  const NodeIndex source = source_for(r.request.name);
  if (!routes_->reachable(at, source)) throw std::runtime_error("no route to the content source");
  forward_interest(now, r, at, routes_->next_hop(at, source));
}

void Simulator::handle(double now, const Inject& e) {
  auto& r = requests_[e.request];
  const NodeIndex consumer = r.request.consumer;
  const NodeIndex ingress = graph_->attached_router(consumer);
  r.trail.push_back(consumer);
  if (cooperative()) leader_tables_[communities_->community_of(ingress)].record_request(r.request.name);
  forward_interest(now, r, consumer, ingress);
}

void Simulator::handle(double now, const InterestAt& e) {
  auto& r = requests_[e.request];
  const NodeIndex node = e.node;
  r.trail.push_back(node);
  if (graph_->role(node) == NodeRole::kSource) {
    if (node != source_for(r.request.name)) throw std::logic_error("Interest reached the wrong source");
    std::vector<NodeIndex> path(r.trail.rbegin(), r.trail.rend());
    serve(now, r, node, std::move(path));
    return;
  }
  if (!r.hint.empty()) {
    ++r.hint_pos;
    if (r.hint_pos + 1 < r.hint.size()) {
      forward_interest(now, r, node, r.hint[r.hint_pos + 1]);
      return;
    }
    r.hint.clear();
    r.hint_pos = 0;
  }
  process_at_router(now, r, node);
}

void Simulator::process_at_router(double now, RequestState& r, NodeIndex node) {
  const ContentId name = r.request.name;
  if (on_path_) on_path_->on_request(node, name);
  if (stores_[node]->lookup(name)) {
    std::vector<NodeIndex> path(r.trail.rbegin(), r.trail.rend());
    serve(now, r, node, std::move(path));
    return;
  }
  if (cooperative()) {
    const NodeIndex leader = communities_->leader_of(node);
    const auto& visited = r.interest.leader_nodes;
    if (std::find(visited.begin(), visited.end(), leader) == visited.end()) {
      r.interest.content_search = true;
      ++r.leader_queries;
      if (counting(r)) report_.control_hops += routes_->hops(node, leader);
      queue_.push(now + routes_->delay(node, leader), LeaderQuery{r.request.id, node, leader});
      return;
    }
  }
  forward_toward_source(now, r, node);
}

void Simulator::handle(double now, const LeaderQuery& e) {
  auto& r = requests_[e.request];
  const ContentId name = r.request.name;
  if (stores_[e.leader]->lookup(name)) {
    r.interest.leader_nodes.push_back(e.leader);
    auto path = routes_->path(e.leader, e.router).nodes;
    path.insert(path.end(), r.trail.rbegin() + 1, r.trail.rend());
    serve(now, r, e.leader, std::move(path));
    return;
  }
  std::optional<NodeIndex> holder;
  const auto& index = holders_[communities_->community_of(e.leader)];
  if (const auto it = index.find(name); it != index.end()) holder = it->second;
  if (counting(r)) report_.control_hops += routes_->hops(e.leader, e.router);
  queue_.push(now + routes_->delay(e.leader, e.router), QueryReply{e.request, e.router, e.leader, holder});
}

void Simulator::handle(double now, const QueryReply& e) {
  auto& r = requests_[e.request];
  r.interest.leader_nodes.push_back(e.leader);
  r.interest.content_search = false;
  r.interest.availability = e.holder.has_value();
  if (!e.holder) {
    r.interest.forwarding_hint.reset();
    forward_toward_source(now, r, e.router);
    return;
  }
  auto hint = routes_->path(e.router, *e.holder);
  r.interest.forwarding_hint = hint;
  if (hint.nodes.size() == 1) {
    process_at_router(now, r, e.router);
    return;
  }
  r.hint = std::move(hint.nodes);
  r.hint_pos = 0;
  forward_interest(now, r, e.router, r.hint[1]);
}

void Simulator::serve(double now, RequestState& r, NodeIndex provider, std::vector<NodeIndex> data_path) {
  DataTransit t;
  t.request = r.request.id;
  t.hit_distance = router_links(*graph_, data_path);
  t.path = std::move(data_path);
  if (cooperative() && graph_->is_router(provider)) t.handled.push_back(communities_->community_of(provider));
  const std::size_t index = transits_.size();
  const NodeIndex next = t.path.at(1);
  transits_.push_back(std::move(t));
  if (counting(r)) ++report_.data_hops;
  queue_.push(now + *graph_->edge_delay(provider, next), DataAt{index, 1});
}

void Simulator::handle(double now, const DataAt& e) {
  auto& t = transits_[e.transit];
  auto& r = requests_[t.request];
  const NodeIndex node = t.path[e.position];
  const ContentId name = r.request.name;

  if (e.position + 1 == t.path.size()) {
    const NodeIndex provider = t.path.front();
    const bool from_cache = graph_->is_router(provider);
    const double latency = now - r.request.time_ms;
    if (r.request.measured) {
      ++report_.measured_requests;
      if (from_cache) {
        ++report_.cache_hits;
      } else {
        ++report_.source_hits;
      }
      report_.summed_latency_ms += latency;
      report_.summed_hit_distance += t.hit_distance;
    }
    if (config_.keep_traces) {
      traces_.push_back(RequestTrace{r.request, provider, from_cache, latency, t.hit_distance, t.path,
                                     r.interest.leader_nodes});
    }
    --pending_requests_;
    t.path.clear();
    t.path.shrink_to_fit();
    return;
  }

  if (graph_->is_router(node)) {
    auto& store = *stores_[node];
    if (on_path_) {
      const auto d = on_path_->on_data(node, name, store);
      if (d.cache) store_at(node, name, &r);
    } else if (cooperative()) {
      const CommunityId c = communities_->community_of(node);
      if (std::find(t.handled.begin(), t.handled.end(), c) == t.handled.end()) {
        t.handled.push_back(c);
        if (!store.contains(name)) {
          // cache location: the community's on-path router nearest the consumer
          // that lacks the content
          NodeIndex candidate = node;
          for (std::size_t j = e.position; j < t.path.size(); ++j) {
            const NodeIndex v = t.path[j];
            if (graph_->is_router(v) && communities_->community_of(v) == c && !stores_[v]->contains(name)) {
              candidate = v;
            }
          }
          const NodeIndex leader = communities_->leaders[c];
          if (counting(r)) report_.control_hops += routes_->hops(node, leader);
          queue_.push(now + routes_->delay(node, leader), CacheAtLeader{t.request, c, candidate});
        }
      }
    }
  }

  const NodeIndex next = t.path[e.position + 1];
  if (counting(r)) ++report_.data_hops;
  queue_.push(now + *graph_->edge_delay(node, next), DataAt{e.transit, e.position + 1});
}

void Simulator::handle(double /*now*/, const CacheAtLeader& e) {
  auto& r = requests_[e.request];
  const ContentId name = r.request.name;
  const NodeIndex leader = communities_->leaders[e.community];
  const bool in_community = holders_[e.community].contains(name);
  if (in_community) return;
  const double avg = trackers_[e.candidate].update(stores_[e.candidate]->size());
  const CommunityView view{false, avg, leader_tables_[e.community]};
  const auto d = cpepc_decide(name, e.candidate, view, red_[e.candidate]);
  if (!d.cache) return;
  if (counting(r)) report_.control_hops += routes_->hops(leader, e.candidate);
  store_at(e.candidate, name, &r);
}

void Simulator::store_at(NodeIndex router, ContentId name, RequestState* cause) {
  const auto result = stores_[router]->insert(name);
  if (!cooperative() || !result.inserted) return;
  const CommunityId c = communities_->community_of(router);
  if (result.evicted) holders_[c].erase(*result.evicted);
  holders_[c][name] = router;
  // one location-update message per store change, unless the leader owns the store
  if (cause && counting(*cause) && router != communities_->leaders[c]) ++report_.control_hops;
}

void Simulator::handle(double now, const PeriodTick& /*e*/) {
  // a tick left over after the last request completed is past the horizon
  if (pending_requests_ == 0) return;
  if (cooperative()) {
    const auto& leaders = communities_->leaders;
    if (now >= measure_from_ms_) {
      for (std::size_t i = 0; i < leaders.size(); ++i) {
        for (std::size_t j = 0; j < leaders.size(); ++j) {
          if (i == j) continue;
          report_.ptable_hops += routes_->hops(leaders[i], leaders[j]);
          ++report_.ptable_transfers;
        }
      }
    }
    // every leader ends up with G_f = sum of all leaders' L_f
    std::map<ContentId, std::uint64_t> totals;
    for (const auto& t : leader_tables_) {
      for (const auto& [name, entry] : t.entries()) {
        if (entry.local_count > 0) totals[name] += entry.local_count;
      }
    }
    for (auto& t : leader_tables_) {
      t.assign_global(totals);
      t.end_period(config_.lambda);
    }
  }
  if (on_path_ && on_path_->periodic()) on_path_->on_period();
  queue_.push(now + config_.period_s * 1000.0, PeriodTick{});
}

MetricsReport run(const SimConfig& config) {
  auto graph = std::make_shared<const NetworkGraph>(with_endpoints(load_topology(config.topology)));
  auto routes = std::make_shared<const RouteTable>(*graph);
  Simulator sim(graph, routes, config);
  return sim.run();
}

}  // namespace cpepc
