#include "cpepc/policy.hpp"

#include <cstdio>
#include <stdexcept>

namespace cpepc {

std::string StrategySpec::label() const {
  switch (kind) {
    case Strategy::kCpepc:
      return "cpepc";
    case Strategy::kPepc:
      return "pepc";
    case Strategy::kLce:
      return "lce";
    case Strategy::kProb: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "prob(%g)", p);
      return buf;
    }
  }
  return "?";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "cpepc") return Strategy::kCpepc;
  if (text == "pepc") return Strategy::kPepc;
  if (text == "lce") return Strategy::kLce;
  if (text == "prob") return Strategy::kProb;
  throw ConfigError("unknown strategy '" + std::string(text) + "' (expected cpepc, pepc, lce or prob)");
}

StrategySpec parse_strategy_spec(std::string_view text) {
  if (text.starts_with("prob(") && text.ends_with(")")) {
    const std::string inner(text.substr(5, text.size() - 6));
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(inner, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != inner.size() || !(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("bad probability in strategy '" + std::string(text) + "'");
    }
    return StrategySpec{Strategy::kProb, p};
  }
  return StrategySpec{parse_strategy(text)};
}

std::string_view to_string(DecisionReason r) {
  switch (r) {
    case DecisionReason::kBelowMin:
      return "below-min";
    case DecisionReason::kMidBand:
      return "mid-band";
    case DecisionReason::kAboveMax:
      return "above-max";
    case DecisionReason::kDuplicate:
      return "duplicate";
    case DecisionReason::kAlways:
      return "always";
    case DecisionReason::kProbabilistic:
      return "probabilistic";
  }
  return "?";
}

double red_probability(double avg_occupancy, const RedState& s) {
  const auto& t = s.thresholds;
  if (!(t.max_th > t.min_th)) throw std::invalid_argument("degenerate thresholds: min_th must be below max_th");
  if (avg_occupancy < t.min_th || avg_occupancy >= t.max_th) {
    throw std::invalid_argument("red_probability is defined for min_th <= A < max_th");
  }
  const double p1 = s.p_max * (avg_occupancy - t.min_th) / (t.max_th - t.min_th);
  const double pressure = static_cast<double>(s.beta) * p1;
  if (pressure >= 1.0) return 1.0;
  return std::min(1.0, p1 / (1.0 - pressure));
}

namespace {

CacheDecision banded(ContentId name, NodeIndex target, double avg, const PTable& table, RedState& s) {
  CacheDecision d;
  if (avg < s.thresholds.min_th) {
    d.cache = true;
    d.reason = DecisionReason::kBelowMin;
  } else if (avg < s.thresholds.max_th) {
    d.reason = DecisionReason::kMidBand;
    d.cache = table.relative_popularity(name) >= red_probability(avg, s);
    if (!d.cache) ++s.beta;
  } else {
    d.reason = DecisionReason::kAboveMax;
    d.cache = table.popularity(name) >= table.popularity_threshold();
  }
  if (d.cache) {
    d.target = target;
    s.beta = 0;
  }
  return d;
}

}  // namespace

CacheDecision cpepc_decide(ContentId name, NodeIndex candidate, const CommunityView& view, RedState& s) {
  if (view.in_community) return {false, std::nullopt, DecisionReason::kDuplicate};
  return banded(name, candidate, view.avg_occupancy, view.ptable, s);
}

CacheDecision pepc_decide(ContentId name, NodeIndex router, double avg_occupancy, const PTable& local,
                          RedState& s) {
  return banded(name, router, avg_occupancy, local, s);
}

CacheDecision lce_decide(ContentId /*name*/, NodeIndex router, bool already_cached) {
  if (already_cached) return {false, std::nullopt, DecisionReason::kDuplicate};
  return {true, router, DecisionReason::kAlways};
}

CacheDecision prob_decide(ContentId /*name*/, NodeIndex router, bool already_cached, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("caching probability must lie in [0, 1]");
  if (already_cached) return {false, std::nullopt, DecisionReason::kDuplicate};
  CacheDecision d;
  d.reason = DecisionReason::kProbabilistic;
  d.cache = rng.uniform() < p;
  if (d.cache) d.target = router;
  return d;
}

CacheDecision LcePolicy::on_data(NodeIndex router, ContentId name, const ContentStore& store) {
  return lce_decide(name, router, store.contains(name));
}

ProbPolicy::ProbPolicy(double p, Rng& rng) : p_(p), rng_(rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("caching probability must lie in [0, 1]");
}

std::string ProbPolicy::name() const { return StrategySpec{Strategy::kProb, p_}.label(); }

CacheDecision ProbPolicy::on_data(NodeIndex router, ContentId name, const ContentStore& store) {
  return prob_decide(name, router, store.contains(name), p_, rng_);
}

PepcPolicy::PepcPolicy(std::size_t node_count, std::size_t capacity, const PepcParams& params)
    : params_(params),
      trackers_(node_count, OccupancyTracker(params.omega)),
      red_(node_count, RedState{params.p_max, 0, compute_thresholds(capacity, params.rho1, params.rho2)}) {
  tables_.reserve(node_count);
  for (NodeIndex v = 0; v < node_count; ++v) tables_.emplace_back(v);
}

void PepcPolicy::on_request(NodeIndex router, ContentId name) { tables_.at(router).record_request(name); }

CacheDecision PepcPolicy::on_data(NodeIndex router, ContentId name, const ContentStore& store) {
  if (store.contains(name)) return {false, std::nullopt, DecisionReason::kDuplicate};
  const double avg = trackers_.at(router).update(store.size());
  return pepc_decide(name, router, avg, tables_.at(router), red_.at(router));
}

void PepcPolicy::on_period() {
  for (auto& t : tables_) {
    if (t.size() == 0) continue;
    t.merge_remote(std::span<const PTable* const>{});
    t.end_period(params_.lambda);
  }
}

}  // namespace cpepc
