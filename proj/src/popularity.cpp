#include "cpepc/popularity.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace cpepc {

void update_popularity(PTableEntry& e, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  e.popularity = lambda * e.popularity + (1.0 - lambda) * static_cast<double>(e.global_count);
  e.local_count = 0;
  e.global_count = 0;
}

const PTableEntry* PTable::find(ContentId name) const {
  const auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

void PTable::record_request(ContentId name) { ++entries_[name].local_count; }

void PTable::merge_remote(std::span<const PTable* const> remotes) {
  for (auto& [name, e] : entries_) e.global_count = e.local_count;
  for (const PTable* remote : remotes) {
    for (const auto& [name, re] : remote->entries()) {
      auto [it, fresh] = entries_.try_emplace(name);
      if (fresh) it->second.global_count = 0;
      it->second.global_count += re.local_count;
    }
  }
}

void PTable::merge_remote(std::span<const PTable> remotes) {
  std::vector<const PTable*> ptrs;
  ptrs.reserve(remotes.size());
  for (const auto& r : remotes) ptrs.push_back(&r);
  merge_remote(std::span<const PTable* const>(ptrs));
}

void PTable::assign_global(const std::map<ContentId, std::uint64_t>& totals) {
  for (auto& [name, e] : entries_) e.global_count = 0;
  for (const auto& [name, total] : totals) entries_[name].global_count = total;
}

void PTable::end_period(double lambda) {
  for (auto it = entries_.begin(); it != entries_.end();) {
    update_popularity(it->second, lambda);
    if (it->second.popularity < kPruneBelow) {
      it = entries_.erase(it);
    } else {
      ++it;
    }
  }
  ++period_;
  refresh_aggregates();
}

void PTable::set_popularity(ContentId name, double p) {
  if (!(p >= 0.0)) throw std::invalid_argument("popularity must be non-negative");
  entries_[name].popularity = p;
  refresh_aggregates();
}

void PTable::refresh_aggregates() {
  sum_p_ = 0.0;
  max_p_ = 0.0;
  for (const auto& [name, e] : entries_) {
    sum_p_ += e.popularity;
    max_p_ = std::max(max_p_, e.popularity);
  }
}

double PTable::popularity_threshold() const {
  if (entries_.empty()) return 0.0;
  return sum_p_ / static_cast<double>(entries_.size());
}

double PTable::popularity(ContentId name) const {
  const auto* e = find(name);
  return e ? e->popularity : 0.0;
}

double PTable::relative_popularity(ContentId name) const {
  if (max_p_ <= 0.0) return 0.0;
  return popularity(name) / max_p_;
}

std::string PTable::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [name, e] : entries_) {
    arr.push_back({{"name", name}, {"L_f", e.local_count}, {"G_f", e.global_count}, {"P", e.popularity}});
  }
  return arr.dump();
}

}  // namespace cpepc
