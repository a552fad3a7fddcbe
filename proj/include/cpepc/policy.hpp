#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpepc/cache.hpp"
#include "cpepc/popularity.hpp"
#include "cpepc/rng.hpp"
#include "cpepc/types.hpp"

namespace cpepc {

enum class Strategy { kCpepc, kPepc, kLce, kProb };

struct StrategySpec {
  Strategy kind = Strategy::kCpepc;
  double p = 0.5;  // Prob(p) only

  /// "cpepc", "pepc", "lce", "prob(0.5)"
  std::string label() const;
  friend bool operator==(const StrategySpec&, const StrategySpec&) = default;
};

Strategy parse_strategy(std::string_view text);
/// Accepts the plain names plus "prob(p)" with an explicit probability.
StrategySpec parse_strategy_spec(std::string_view text);

/// Per-store state of the RED-style admission rule.
struct RedState {
  double p_max = 1.0;
  std::uint64_t beta = 0;  // consecutive mid-band evaluations that did not cache
  Thresholds thresholds;
};

enum class DecisionReason { kBelowMin, kMidBand, kAboveMax, kDuplicate, kAlways, kProbabilistic };

std::string_view to_string(DecisionReason r);

struct CacheDecision {
  bool cache = false;
  std::optional<NodeIndex> target;
  DecisionReason reason = DecisionReason::kDuplicate;
};

/// P1 = P_max (A - min_th) / (max_th - min_th); returns P2 = P1 / (1 - beta P1),
/// saturating at 1 once beta * P1 >= 1. Requires min_th <= A < max_th.
double red_probability(double avg_occupancy, const RedState& s);

struct CommunityView {
  bool in_community = false;  // name already cached somewhere in the community
  double avg_occupancy = 0.0;  // candidate store, already updated for this evaluation
  const PTable& ptable;        // the community leader's table
};

/// Leader-side admission for the community's candidate router:
///   A < min_th            -> cache
///   min_th <= A < max_th  -> cache iff relative popularity >= P2
///   A >= max_th           -> cache iff P(name) >= mean popularity
/// beta resets when content is cached and grows on each mid-band refusal.
CacheDecision cpepc_decide(ContentId name, NodeIndex candidate, const CommunityView& view, RedState& s);

/// Same three bands on one router's own occupancy and own table; no
/// community duplicate check.
CacheDecision pepc_decide(ContentId name, NodeIndex router, double avg_occupancy, const PTable& local,
                          RedState& s);

CacheDecision lce_decide(ContentId name, NodeIndex router, bool already_cached);

CacheDecision prob_decide(ContentId name, NodeIndex router, bool already_cached, double p, Rng& rng);

/// Extension point for non-cooperative on-path strategies. The engine calls
/// on_request for every router an Interest reaches, on_data for every router a
/// Data packet passes (provider excluded), and on_period every exchange interval.
class OnPathPolicy {
 public:
  virtual ~OnPathPolicy() = default;
  virtual std::string name() const = 0;
  virtual void on_request(NodeIndex /*router*/, ContentId /*name*/) {}
  virtual CacheDecision on_data(NodeIndex router, ContentId name, const ContentStore& store) = 0;
  virtual bool periodic() const { return false; }
  virtual void on_period() {}
};

class LcePolicy final : public OnPathPolicy {
 public:
  std::string name() const override { return "lce"; }
  CacheDecision on_data(NodeIndex router, ContentId name, const ContentStore& store) override;
};

class ProbPolicy final : public OnPathPolicy {
 public:
  ProbPolicy(double p, Rng& rng);
  std::string name() const override;
  CacheDecision on_data(NodeIndex router, ContentId name, const ContentStore& store) override;

 private:
  double p_;
  Rng& rng_;
};

struct PepcParams {
  double rho1 = 0.2;
  double rho2 = 0.6;
  double p_max = 1.0;
  double lambda = 0.125;
  double omega = 0.125;
};

/// Per-router predictive caching without cooperation: each router keeps its
/// own request table (EWMA-updated every period with G_f = L_f), occupancy
/// average and RED state.
class PepcPolicy final : public OnPathPolicy {
 public:
  PepcPolicy(std::size_t node_count, std::size_t capacity, const PepcParams& params);
  std::string name() const override { return "pepc"; }
  void on_request(NodeIndex router, ContentId name) override;
  CacheDecision on_data(NodeIndex router, ContentId name, const ContentStore& store) override;
  bool periodic() const override { return true; }
  void on_period() override;

  const PTable& table(NodeIndex router) const { return tables_.at(router); }

 private:
  PepcParams params_;
  std::vector<PTable> tables_;
  std::vector<OccupancyTracker> trackers_;
  std::vector<RedState> red_;
};

}  // namespace cpepc
