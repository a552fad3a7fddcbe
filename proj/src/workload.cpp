#include "cpepc/workload.hpp"

#include <cmath>
#include <stdexcept>

namespace cpepc {

ZipfDistribution::ZipfDistribution(std::size_t catalog_size, double alpha) : alpha_(alpha) {
  if (catalog_size == 0) throw std::invalid_argument("Zipf catalog must not be empty");
  if (!(alpha >= 0.0)) throw std::invalid_argument("Zipf alpha must be non-negative");
  cdf_.resize(catalog_size);
  double acc = 0.0;
  for (std::size_t i = 0; i < catalog_size; ++i) {
    acc += std::pow(static_cast<double>(i + 1), -alpha);
    cdf_[i] = acc;
  }
  for (auto& c : cdf_) c /= acc;
  cdf_.back() = 1.0;
}

double ZipfDistribution::pmf(ContentId rank) const {
  if (rank < 1 || rank > cdf_.size()) return 0.0;
  return rank == 1 ? cdf_[0] : cdf_[rank - 1] - cdf_[rank - 2];
}

ContentId ZipfDistribution::operator()(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return static_cast<ContentId>(cdf_.size());
  return static_cast<ContentId>(it - cdf_.begin() + 1);
}

std::vector<Request> generate_requests(const Workload& w, std::span<const NodeIndex> consumers) {
  if (consumers.empty()) throw std::invalid_argument("workload needs at least one consumer");
  if (!(w.rate > 0.0)) throw std::invalid_argument("request rate must be positive");
  const ZipfDistribution zipf(w.catalog_size, w.alpha);
  Rng rng(stream_seed(w.seed, Stream::kWorkload));
  const std::size_t total = w.warmup_count + w.request_count;
  std::vector<Request> out;
  out.reserve(total);
  double t = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    t += 1000.0 * rng.exponential(w.rate);
    Request r;
    r.id = i;
    r.time_ms = t;
    r.consumer = consumers[rng.below(consumers.size())];
    r.name = zipf.sample(rng);
    r.measured = i >= w.warmup_count;
    out.push_back(r);
  }
  return out;
}

}  // namespace cpepc
