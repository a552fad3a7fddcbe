#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "cpepc/cache.hpp"
#include "cpepc/community.hpp"
#include "cpepc/policy.hpp"
#include "cpepc/popularity.hpp"
#include "cpepc/topology.hpp"
#include "cpepc/workload.hpp"

namespace cpepc {

struct SimConfig {
  std::filesystem::path topology;
  StrategySpec strategy;
  Replacement replacement = Replacement::kLru;
  double cache_fraction_pct = 0.1;        // per-router capacity, percent of the catalog
  std::optional<std::size_t> cache_slots;  // absolute per-router capacity, overrides the fraction
  std::size_t catalog_size = 10'000;
  double alpha = 0.8;
  double rate = 10.0;
  std::size_t requests = 100'000;
  std::size_t warmup = 50'000;
  double period_s = 10.0;
  double tau = 0.15;
  std::optional<std::size_t> community_target;  // overrides ceil(tau * V)
  double rho1 = 0.2;
  double rho2 = 0.6;
  double p_max = 1.0;
  double lambda = 0.125;
  double omega = 0.125;
  std::uint64_t seed = 1;
  /// Check for intra-community duplicates every N events under CPePC (0 = off).
  std::size_t redundancy_check_interval = 1000;
  bool keep_traces = false;

  /// max(1, round(cache_fraction_pct / 100 * catalog)) unless cache_slots is set.
  std::size_t cache_capacity() const;
  Workload workload() const;
  void validate() const;
};

/// Outcome of one run. Everything here is a pure function of the config and
/// seed; wall-clock time is deliberately not part of it.
struct MetricsReport {
  std::uint64_t measured_requests = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t source_hits = 0;
  double cache_hit_ratio = 0.0;
  double avg_latency_ms = 0.0;
  double avg_hit_distance = 0.0;
  double summed_latency_ms = 0.0;
  std::uint64_t summed_hit_distance = 0;

  std::uint64_t message_count = 0;
  std::uint64_t interest_hops = 0;
  std::uint64_t data_hops = 0;
  std::uint64_t control_hops = 0;
  std::uint64_t ptable_hops = 0;
  std::uint64_t ptable_transfers = 0;

  std::size_t cache_capacity = 0;
  std::size_t achieved_community_count = 0;
  std::size_t target_community_count = 0;
  double resolution = 0.0;

  double runtime_ms = 0.0;  // simulated time of the last event
  std::uint64_t events = 0;
  std::uint64_t causality_violations = 0;
  std::uint64_t redundancy_checks = 0;
  std::uint64_t redundancy_violations = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

enum class PacketKind { kInterest, kData, kControl };

/// Interest/Control packet fields used for leader coordination. Control
/// packets carry the flags; Interests carry the visited-leader list.
struct Packet {
  PacketKind kind = PacketKind::kInterest;
  ContentId content_name = 0;
  std::uint64_t nonce = 0;
  std::vector<NodeIndex> leader_nodes;
  std::optional<RoutePath> forwarding_hint;
  bool content_search = false;
  bool availability = false;
  bool caching = false;
  std::optional<NodeIndex> cache_location;
};

struct RequestTrace {
  Request request;
  NodeIndex provider = kNoNode;
  bool from_cache = false;
  double latency_ms = 0.0;
  std::size_t hit_distance = 0;
  std::vector<NodeIndex> data_path;     // provider ... consumer
  std::vector<NodeIndex> leader_nodes;  // leaders consulted, in order
};

/// Discrete-event simulation of one run. Interests and Data move hop by hop
/// with link delays; leader queries, replies and caching copies are modelled
/// as timed control messages along shortest paths.
class Simulator {
 public:
  Simulator(std::shared_ptr<const NetworkGraph> graph, std::shared_ptr<const RouteTable> routes, SimConfig config,
            std::optional<CommunityAssignment> communities = std::nullopt);
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Runs the configured workload.
  MetricsReport run();
  /// Runs an explicit request schedule (ids must be 0..n-1 in order).
  MetricsReport run(std::vector<Request> schedule);

  /// Places content directly in a router's store before a run (bypasses the
  /// caching policy but keeps the leader's location index in sync).
  void preload(NodeIndex router, ContentId name);

  const NetworkGraph& graph() const { return *graph_; }
  const SimConfig& config() const { return config_; }
  const ContentStore& store(NodeIndex router) const;
  const std::optional<CommunityAssignment>& communities() const { return communities_; }
  const PTable& leader_table(CommunityId c) const { return leader_tables_.at(c); }
  NodeIndex source_for(ContentId name) const;
  const std::vector<RequestTrace>& traces() const { return traces_; }

  /// Names stored at two or more routers of one community.
  std::size_t count_intra_community_duplicates() const;

 private:
  struct RequestState {
    Request request;
    Packet interest;
    std::vector<NodeIndex> trail;  // consumer, then every node the Interest reached
    std::vector<NodeIndex> hint;   // pending forwarding-hint path
    std::size_t hint_pos = 0;
    std::size_t leader_queries = 0;
  };
  struct DataTransit {
    std::uint64_t request;
    std::vector<NodeIndex> path;
    std::vector<CommunityId> handled;  // communities whose caching step already ran
    std::size_t hit_distance = 0;
  };

  struct Inject {
    std::uint64_t request;
  };
  struct InterestAt {
    std::uint64_t request;
    NodeIndex node;
  };
  struct LeaderQuery {
    std::uint64_t request;
    NodeIndex router;
    NodeIndex leader;
  };
  struct QueryReply {
    std::uint64_t request;
    NodeIndex router;
    NodeIndex leader;
    std::optional<NodeIndex> holder;
  };
  struct DataAt {
    std::size_t transit;
    std::size_t position;
  };
  struct CacheAtLeader {
    std::uint64_t request;
    CommunityId community;
    NodeIndex candidate;
  };
  struct PeriodTick {};
  using Action = std::variant<Inject, InterestAt, LeaderQuery, QueryReply, DataAt, CacheAtLeader, PeriodTick>;

  bool cooperative() const { return config_.strategy.kind == Strategy::kCpepc; }
  bool counting(const RequestState& r) const;

  void process_at_router(double now, RequestState& r, NodeIndex node);
  void handle(double now, const Inject& e);
  void handle(double now, const InterestAt& e);
  void handle(double now, const LeaderQuery& e);
  void handle(double now, const QueryReply& e);
  void handle(double now, const DataAt& e);
  void handle(double now, const CacheAtLeader& e);
  void handle(double now, const PeriodTick& e);

  void forward_interest(double now, RequestState& r, NodeIndex from, NodeIndex to);
  void forward_toward_source(double now, RequestState& r, NodeIndex at);
  void serve(double now, RequestState& r, NodeIndex provider, std::vector<NodeIndex> data_path);
  void store_at(NodeIndex router, ContentId name, RequestState* cause);
  void check_redundancy();

  std::shared_ptr<const NetworkGraph> graph_;
  std::shared_ptr<const RouteTable> routes_;
  SimConfig config_;
  std::optional<CommunityAssignment> communities_;

  Rng policy_rng_;
  Rng replacement_rng_;
  std::vector<NodeIndex> sources_;
  std::vector<std::optional<ContentStore>> stores_;  // engaged for routers
  std::unique_ptr<OnPathPolicy> on_path_;

  // cooperative state, indexed by community id / node
  std::vector<PTable> leader_tables_;
  std::vector<std::unordered_map<ContentId, NodeIndex>> holders_;
  std::vector<OccupancyTracker> trackers_;
  std::vector<RedState> red_;

  EventQueue<Action> queue_;
  std::vector<RequestState> requests_;
  std::vector<DataTransit> transits_;
  std::vector<RequestTrace> traces_;
  MetricsReport report_;
  double now_ = 0.0;
  double measure_from_ms_ = 0.0;
  std::size_t pending_requests_ = 0;
  bool ran_ = false;
};

/// Loads the topology (attaching endpoints when the document has none), builds
/// routes and runs one simulation.
MetricsReport run(const SimConfig& config);

}  // namespace cpepc
