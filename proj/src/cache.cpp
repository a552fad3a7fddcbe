#include "cpepc/cache.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cpepc {

std::string_view to_string(Replacement r) {
  switch (r) {
    case Replacement::kLru:
      return "lru";
    case Replacement::kRandom:
      return "random";
    case Replacement::kPlfu:
      return "plfu";
  }
  return "?";
}

Replacement parse_replacement(std::string_view text) {
  if (text == "lru" || text == "LRU") return Replacement::kLru;
  if (text == "random" || text == "Random") return Replacement::kRandom;
  if (text == "plfu" || text == "PLFU") return Replacement::kPlfu;
  throw ConfigError("unknown replacement policy '" + std::string(text) + "'");
}

ContentStore::ContentStore(std::size_t capacity, Replacement policy, Rng* rng)
    : capacity_(capacity), policy_(policy), rng_(rng) {
  if (policy == Replacement::kRandom && rng == nullptr) {
    throw std::invalid_argument("random replacement needs a generator");
  }
}

std::size_t ContentStore::size() const {
  switch (policy_) {
    case Replacement::kLru:
      return lru_index_.size();
    case Replacement::kRandom:
      return slots_.size();
    case Replacement::kPlfu:
      return by_count_.size();
  }
  return 0;
}

bool ContentStore::contains(ContentId name) const {
  switch (policy_) {
    case Replacement::kLru:
      return lru_index_.contains(name);
    case Replacement::kRandom:
      return slot_index_.contains(name);
    case Replacement::kPlfu: {
      const auto it = counts_.find(name);
      return it != counts_.end() && by_count_.contains({it->second, name});
    }
  }
  return false;
}

bool ContentStore::lookup(ContentId name) {
  switch (policy_) {
    case Replacement::kLru: {
      const auto it = lru_index_.find(name);
      if (it == lru_index_.end()) return false;
      lru_.splice(lru_.begin(), lru_, it->second);
      return true;
    }
    case Replacement::kRandom:
      return slot_index_.contains(name);
    case Replacement::kPlfu: {
      auto& c = counts_[name];
      const bool hit = by_count_.erase({c, name}) > 0;
      ++c;
      if (hit) by_count_.insert({c, name});
      return hit;
    }
  }
  return false;
}

InsertResult ContentStore::insert(ContentId name) {
  InsertResult out;
  if (capacity_ == 0 || contains(name)) return out;
  switch (policy_) {
    case Replacement::kLru:
      if (lru_index_.size() >= capacity_) {
        out.evicted = lru_.back();
        lru_index_.erase(lru_.back());
        lru_.pop_back();
      }
      lru_.push_front(name);
      lru_index_[name] = lru_.begin();
      break;
    case Replacement::kRandom:
      if (slots_.size() >= capacity_) {
        const std::size_t victim = rng_->below(slots_.size());
        out.evicted = slots_[victim];
        slot_index_.erase(slots_[victim]);
        slots_[victim] = slots_.back();
        slot_index_[slots_[victim]] = victim;
        slots_.pop_back();
      }
      slot_index_[name] = slots_.size();
      slots_.push_back(name);
      break;
    case Replacement::kPlfu: {
      const std::uint64_t c = counts_[name];
      if (by_count_.size() >= capacity_) {
        const auto weakest = by_count_.begin();
        if (c <= weakest->first) return out;
        out.evicted = weakest->second;
        by_count_.erase(weakest);
      }
      by_count_.insert({c, name});
      break;
    }
  }
  out.inserted = true;
  return out;
}

std::uint64_t ContentStore::frequency(ContentId name) const {
  const auto it = counts_.find(name);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<ContentId> ContentStore::contents() const {
  std::vector<ContentId> out;
  switch (policy_) {
    case Replacement::kLru:
      out.assign(lru_.begin(), lru_.end());
      break;
    case Replacement::kRandom:
      out = slots_;
      break;
    case Replacement::kPlfu:
      for (const auto& [c, name] : by_count_) out.push_back(name);
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

OccupancyTracker::OccupancyTracker(double weight, double initial) : weight_(weight), average_(initial) {
  if (!(weight >= 0.0 && weight <= 1.0)) throw std::invalid_argument("occupancy weight must lie in [0, 1]");
}

double OccupancyTracker::update(std::size_t occupancy) {
  average_ = (1.0 - weight_) * average_ + weight_ * static_cast<double>(occupancy);
  return average_;
}

Thresholds compute_thresholds(std::size_t capacity, double rho1, double rho2) {
  if (!(rho1 >= 0.0 && rho2 <= 1.0 && rho1 < rho2)) {
    throw std::invalid_argument("thresholds need 0 <= rho1 < rho2 <= 1");
  }
  const auto s = static_cast<double>(capacity);
  return {rho1 * s, rho2 * s};
}

}  // namespace cpepc
