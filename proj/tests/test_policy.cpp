#include <gtest/gtest.h>

#include "cpepc/policy.hpp"

using namespace cpepc;

namespace {

RedState red(std::size_t capacity = 100, std::uint64_t beta = 0) {
  return RedState{1.0, beta, compute_thresholds(capacity, 0.2, 0.6)};
}

}  // namespace

TEST(Red, Probability) {
  auto s = red();
  EXPECT_EQ(red_probability(20.0, s), 0.0);
  EXPECT_NEAR(red_probability(40.0, s), 0.5, 0.5e-9);

  // P1 = 0.4 at A = 36; beta 3 gives beta * P1 = 1.2 -> saturate
  auto hot = red(100, 3);
  EXPECT_EQ(red_probability(36.0, hot), 1.0);
  // beta 1: 0.4 / 0.6
  auto warm = red(100, 1);
  EXPECT_NEAR(red_probability(36.0, warm), 0.4 / 0.6, 1e-9);

  EXPECT_THROW(red_probability(60.0, s), std::invalid_argument);
  EXPECT_THROW(red_probability(10.0, s), std::invalid_argument);
  RedState flat{1.0, 0, Thresholds{5, 5}};
  EXPECT_THROW(red_probability(5.0, flat), std::invalid_argument);
}

TEST(Red, MonotoneInOccupancyAndBeta) {
  for (std::uint64_t beta = 0; beta < 6; ++beta) {
    auto s = red(100, beta);
    double prev = -1;
    for (double a = 20; a < 60; a += 0.25) {
      const double p = red_probability(a, s);
      EXPECT_GE(p, prev);
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
      prev = p;
    }
  }
  for (double a = 20; a < 60; a += 1) {
    double prev = -1;
    for (std::uint64_t beta = 0; beta < 10; ++beta) {
      auto s = red(100, beta);
      const double p = red_probability(a, s);
      EXPECT_GE(p, prev);
      prev = p;
    }
  }
}

TEST(Cpepc, Bands) {
  PTable t(0);
  t.set_popularity(1, 9.0);
  t.set_popularity(2, 10.0);
  t.set_popularity(3, 2.0);
  t.set_popularity(4, 8.0);

  auto s = red();
  const auto low = cpepc_decide(1, 42, CommunityView{false, 10.0, t}, s);
  EXPECT_TRUE(low.cache);
  EXPECT_EQ(low.reason, DecisionReason::kBelowMin);
  EXPECT_EQ(low.target, std::optional<NodeIndex>(42));

  // mid band, A = 40 -> P2 = 0.5, RO(1) = 0.9
  auto m = red();
  const auto mid = cpepc_decide(1, 42, CommunityView{false, 40.0, t}, m);
  EXPECT_TRUE(mid.cache);
  EXPECT_EQ(mid.reason, DecisionReason::kMidBand);

  // high band: P = 2 below the mean
  PTable h(0);
  h.set_popularity(1, 2.0);
  h.set_popularity(2, 8.0);  // mean 5
  auto hs = red();
  const auto high = cpepc_decide(1, 42, CommunityView{false, 70.0, h}, hs);
  EXPECT_FALSE(high.cache);
  EXPECT_EQ(high.reason, DecisionReason::kAboveMax);
  EXPECT_TRUE(cpepc_decide(2, 42, CommunityView{false, 70.0, h}, hs).cache);

  auto ds = red();
  const auto dup = cpepc_decide(1, 42, CommunityView{true, 0.0, t}, ds);
  EXPECT_FALSE(dup.cache);
  EXPECT_EQ(dup.reason, DecisionReason::kDuplicate);
}

TEST(Cpepc, BetaCountsRefusalsAndResetsOnCache) {
  PTable t(0);
  t.set_popularity(1, 1.0);
  t.set_popularity(2, 10.0);  // RO(1) = 0.1
  auto s = red();
  // A = 40 -> P1 = 0.5 > 0.1, refused
  EXPECT_FALSE(cpepc_decide(1, 0, CommunityView{false, 40.0, t}, s).cache);
  EXPECT_EQ(s.beta, 1u);
  EXPECT_FALSE(cpepc_decide(1, 0, CommunityView{false, 40.0, t}, s).cache);
  EXPECT_EQ(s.beta, 2u);
  EXPECT_TRUE(cpepc_decide(1, 0, CommunityView{false, 5.0, t}, s).cache);
  EXPECT_EQ(s.beta, 0u);
}

TEST(Cpepc, LowBandIgnoresPopularity) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    PTable t(0);
    for (ContentId n = 1; n <= 5; ++n) t.set_popularity(n, rng.uniform() * 10);
    auto s = red();
    const double a = rng.uniform() * 19.99;
    EXPECT_TRUE(cpepc_decide(1 + rng.below(8), 0, CommunityView{false, a, t}, s).cache);
  }
}

TEST(Pepc, LocalBands) {
  PTable empty(0);
  auto s = red();
  EXPECT_TRUE(pepc_decide(1, 3, 5.0, empty, s).cache);
  // empty table: RO = 0 never clears a positive P2
  auto m = red();
  EXPECT_FALSE(pepc_decide(1, 3, 30.0, empty, m).cache);
}

TEST(Lce, AlwaysCachesMisses) {
  EXPECT_TRUE(lce_decide(1, 2, false).cache);
  const auto dup = lce_decide(1, 2, true);
  EXPECT_FALSE(dup.cache);
  EXPECT_EQ(dup.reason, DecisionReason::kDuplicate);
}

TEST(Prob, BoundariesAndReplay) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    EXPECT_TRUE(prob_decide(1, 0, false, 1.0, rng).cache);
    EXPECT_FALSE(prob_decide(1, 0, false, 0.0, rng).cache);
  }
  EXPECT_THROW(prob_decide(1, 0, false, 1.5, rng), std::invalid_argument);

  Rng a(77), b(77), oracle(77);
  for (int i = 0; i < 200; ++i) {
    const bool x = prob_decide(1, 0, false, 0.5, a).cache;
    EXPECT_EQ(x, prob_decide(1, 0, false, 0.5, b).cache);
    EXPECT_EQ(x, oracle.uniform() < 0.5);
  }
}

TEST(Strategy, Parsing) {
  EXPECT_EQ(parse_strategy("cpepc"), Strategy::kCpepc);
  EXPECT_EQ(parse_strategy_spec("prob(0.25)").p, 0.25);
  EXPECT_EQ(parse_strategy_spec("prob(0.25)").label(), "prob(0.25)");
  EXPECT_EQ((StrategySpec{Strategy::kProb, 0.5}).label(), "prob(0.5)");
  EXPECT_THROW(parse_strategy("crus"), ConfigError);
  EXPECT_THROW(parse_strategy_spec("prob(2)"), ConfigError);
  EXPECT_THROW(parse_strategy_spec("prob(x)"), ConfigError);
}
