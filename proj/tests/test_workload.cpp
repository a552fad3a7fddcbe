#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cpepc/workload.hpp"

using namespace cpepc;

TEST(Zipf, Pmf) {
  const ZipfDistribution uniform(4, 0.0);
  for (ContentId r = 1; r <= 4; ++r) EXPECT_NEAR(uniform.pmf(r), 0.25, 1e-12);
  const ZipfDistribution two(2, 1.0);
  EXPECT_NEAR(two.pmf(1), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(two.pmf(2), 1.0 / 3.0, 1e-12);
  EXPECT_THROW(ZipfDistribution(0, 1.0), std::invalid_argument);
  EXPECT_THROW(ZipfDistribution(5, -0.1), std::invalid_argument);
}

TEST(Zipf, InverseCdfEdges) {
  const ZipfDistribution z(3, 1.0);
  EXPECT_EQ(z(0.0), 1u);
  EXPECT_EQ(z(std::nextafter(1.0, 0.0)), 3u);
  // cdf(1) = 6/11
  EXPECT_EQ(z(6.0 / 11.0 - 1e-12), 1u);
  EXPECT_EQ(z(6.0 / 11.0 + 1e-12), 2u);
}

TEST(Zipf, EmpiricalPmfMatches) {
  const std::size_t n = 100;
  const ZipfDistribution z(n, 0.8);
  // analytic pmf computed independently
  double norm = 0;
  for (std::size_t i = 1; i <= n; ++i) norm += std::pow(static_cast<double>(i), -0.8);
  Rng rng(123);
  std::vector<double> hits(n + 1, 0);
  const int samples = 100'000;
  for (int i = 0; i < samples; ++i) ++hits[z.sample(rng)];
  for (std::size_t i = 1; i <= n; ++i) {
    const double expected = std::pow(static_cast<double>(i), -0.8) / norm;
    EXPECT_NEAR(hits[i] / samples, expected, 0.01) << "rank " << i;
  }
}

TEST(Workload, PoissonGapsAndTagging) {
  Workload w;
  w.rate = 10;
  w.request_count = 10'000;
  w.warmup_count = 0;
  w.catalog_size = 50;
  const std::vector<NodeIndex> consumers{3, 4, 5};
  const auto reqs = generate_requests(w, consumers);
  ASSERT_EQ(reqs.size(), 10'000u);
  EXPECT_NEAR(reqs.back().time_ms / reqs.size(), 100.0, 5.0);
  for (std::size_t i = 1; i < reqs.size(); ++i) EXPECT_GE(reqs[i].time_ms, reqs[i - 1].time_ms);

  Workload small;
  small.request_count = 3;
  small.warmup_count = 2;
  small.catalog_size = 10;
  const auto tagged = generate_requests(small, consumers);
  ASSERT_EQ(tagged.size(), 5u);
  EXPECT_FALSE(tagged[0].measured);
  EXPECT_FALSE(tagged[1].measured);
  EXPECT_TRUE(tagged[2].measured);
  EXPECT_TRUE(tagged[4].measured);
  for (std::size_t i = 0; i < tagged.size(); ++i) EXPECT_EQ(tagged[i].id, i);
}

TEST(Workload, SeedDeterminesSchedule) {
  Workload w;
  w.request_count = 500;
  w.warmup_count = 100;
  w.catalog_size = 1000;
  const std::vector<NodeIndex> consumers{0, 1, 2, 7};
  EXPECT_EQ(generate_requests(w, consumers), generate_requests(w, consumers));
  w.seed = 2;
  const auto other = generate_requests(w, consumers);
  w.seed = 1;
  EXPECT_NE(generate_requests(w, consumers), other);
  EXPECT_THROW(generate_requests(w, {}), std::invalid_argument);
}

TEST(EventQueue, OrdersByTimeThenInsertion) {
  EventQueue<int> q;
  q.push(5.0, 1);
  q.push(1.0, 2);
  q.push(5.0, 3);
  q.push(1.0, 4);
  std::vector<int> order;
  while (!q.empty()) order.push_back(q.pop().action);
  EXPECT_EQ(order, (std::vector<int>{2, 4, 1, 3}));
}
