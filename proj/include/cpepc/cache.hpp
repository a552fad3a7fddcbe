#pragma once

#include <cstdint>
#include <list>
#include <optional>
#include <set>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cpepc/rng.hpp"
#include "cpepc/types.hpp"

namespace cpepc {

enum class Replacement { kLru, kRandom, kPlfu };

std::string_view to_string(Replacement r);
Replacement parse_replacement(std::string_view text);

struct InsertResult {
  bool inserted = false;
  std::optional<ContentId> evicted;
};

/// Bounded store of unit-sized content objects.
///
/// PLFU counts every lookup at this store, cached or not, and only admits a
/// new object into a full store when its count is strictly above the
/// smallest count among cached objects (ties evict the smallest name).
/// Random eviction draws from the generator passed at construction, which
/// must outlive the store.
class ContentStore {
 public:
  ContentStore(std::size_t capacity, Replacement policy, Rng* rng = nullptr);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const;
  Replacement policy() const { return policy_; }

  bool contains(ContentId name) const;
  /// Cache lookup for an arriving request; refreshes LRU recency and bumps
  /// the PLFU counter.
  bool lookup(ContentId name);
  /// Duplicate insert is a no-op; capacity 0 always rejects.
  InsertResult insert(ContentId name);

  std::uint64_t frequency(ContentId name) const;
  /// Cached names in ascending order.
  std::vector<ContentId> contents() const;

 private:
  std::size_t capacity_;
  Replacement policy_;
  Rng* rng_;

  // LRU: front is most recent
  std::list<ContentId> lru_;
  std::unordered_map<ContentId, std::list<ContentId>::iterator> lru_index_;

  // Random
  std::vector<ContentId> slots_;
  std::unordered_map<ContentId, std::size_t> slot_index_;

  // PLFU
  std::unordered_map<ContentId, std::uint64_t> counts_;
  std::set<std::pair<std::uint64_t, ContentId>> by_count_;
};

/// EWMA of a store's occupancy: A <- (1 - w) * A + w * occupancy.
class OccupancyTracker {
 public:
  explicit OccupancyTracker(double weight = 0.125, double initial = 0.0);

  double update(std::size_t occupancy);
  double average() const { return average_; }
  double weight() const { return weight_; }

 private:
  double weight_;
  double average_;
};

struct Thresholds {
  double min_th = 0.0;
  double max_th = 0.0;
};

/// min_th = rho1 * S, max_th = rho2 * S; requires 0 <= rho1 < rho2 <= 1.
Thresholds compute_thresholds(std::size_t capacity, double rho1, double rho2);

}  // namespace cpepc
