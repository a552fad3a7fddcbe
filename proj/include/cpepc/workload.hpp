#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "cpepc/rng.hpp"
#include "cpepc/types.hpp"

namespace cpepc {

/// Zipf(alpha) over ranks 1..n, sampled by inverse CDF over a cumulative table.
class ZipfDistribution {
 public:
  ZipfDistribution(std::size_t catalog_size, double alpha);

  std::size_t size() const { return cdf_.size(); }
  double alpha() const { return alpha_; }
  double pmf(ContentId rank) const;
  ContentId sample(Rng& rng) const { return operator()(rng.uniform()); }
  /// Rank for a uniform variate u in [0, 1).
  ContentId operator()(double u) const;

 private:
  double alpha_;
  std::vector<double> cdf_;
};

struct Workload {
  std::size_t catalog_size = 10'000;
  double alpha = 0.8;
  double rate = 10.0;  // requests per second, Poisson
  std::size_t request_count = 100'000;
  std::size_t warmup_count = 50'000;
  std::uint64_t seed = 1;
};

struct Request {
  std::uint64_t id = 0;  // doubles as the Interest nonce
  double time_ms = 0.0;
  NodeIndex consumer = kNoNode;
  ContentId name = 0;
  bool measured = false;

  friend bool operator==(const Request&, const Request&) = default;
};

/// warmup_count + request_count requests with exponential gaps (mean
/// 1000/rate ms), uniformly chosen consumers and Zipf-distributed names.
/// The first warmup_count are unmeasured.
std::vector<Request> generate_requests(const Workload& w, std::span<const NodeIndex> consumers);

/// Min-queue ordered by (time, insertion sequence); equal times pop in push
/// order, which keeps runs deterministic.
template <class Action>
class EventQueue {
 public:
  struct Event {
    double time;
    std::uint64_t sequence;
    Action action;
  };

  void push(double time, Action action) { push_event({time, next_sequence_++, std::move(action)}); }

  Event pop() {
    std::pop_heap(heap_.begin(), heap_.end(), later);
    Event e = std::move(heap_.back());
    heap_.pop_back();
    return e;
  }

  const Event& top() const { return heap_.front(); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  static bool later(const Event& a, const Event& b) {
    if (a.time != b.time) return a.time > b.time;
    return a.sequence > b.sequence;
  }
  void push_event(Event e) {
    heap_.push_back(std::move(e));
    std::push_heap(heap_.begin(), heap_.end(), later);
  }

  std::vector<Event> heap_;
  std::uint64_t next_sequence_ = 0;
};

/// Pushes every generated request into the queue at its injection time.
template <class Action, class MakeAction>
void inject_requests(const Workload& w, std::span<const NodeIndex> consumers, EventQueue<Action>& queue,
                     MakeAction&& make) {
  for (auto& r : generate_requests(w, consumers)) queue.push(r.time_ms, make(std::move(r)));
}

}  // namespace cpepc
