#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "cpepc/types.hpp"

namespace cpepc {

struct PTableEntry {
  std::uint64_t local_count = 0;   // L_f: requests seen in the owner's scope this period
  std::uint64_t global_count = 0;  // G_f: L_f summed over all exchanged tables
  double popularity = 0.0;         // P: EWMA of G_f across periods
};

struct PopularityParams {
  double lambda = 0.125;   // EWMA smoothing factor, in [0, 1]
  double period_s = 10.0;  // exchange interval T
};

/// Entries whose counters are zero and whose popularity fell below this after
/// an update are dropped.
inline constexpr double kPruneBelow = 1e-6;

/// Popularity table kept by a community leader (or, for the non-cooperative
/// variant, by a single router).
///
/// Sum and maximum of P are cached so threshold and relative-popularity
/// queries are O(1); P itself only changes inside end_period().
class PTable {
 public:
  using Entries = std::map<ContentId, PTableEntry>;

  PTable() = default;
  explicit PTable(NodeIndex owner) : owner_(owner) {}

  NodeIndex owner() const { return owner_; }
  std::uint64_t period_index() const { return period_; }
  const Entries& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const PTableEntry* find(ContentId name) const;

  /// L_f += 1, creating the entry (L_f = 1, G_f = 0, P = 0) if needed.
  void record_request(ContentId name);

  /// G_f = own L_f + sum of remote L_f, for every name present locally or
  /// remotely. Names only known remotely get a local entry with L_f = 0.
  void merge_remote(std::span<const PTable* const> remotes);
  void merge_remote(std::span<const PTable> remotes);
  /// Equivalent to merge_remote when `totals` holds L_f summed over this
  /// table and all remotes.
  void assign_global(const std::map<ContentId, std::uint64_t>& totals);

  /// Applies the EWMA update to every entry, resets counters, prunes dead
  /// entries and refreshes the cached aggregates.
  void end_period(double lambda);

  /// Overwrites P for one name (creating the entry); used to seed tables.
  void set_popularity(ContentId name, double p);

  /// Mean popularity over current entries (0 when empty).
  double popularity_threshold() const;
  double max_popularity() const { return max_p_; }
  double popularity(ContentId name) const;

  /// P(name) / max P in [0, 1]; 0 for unknown names or an all-zero table.
  double relative_popularity(ContentId name) const;

  std::string to_json() const;

 private:
  void refresh_aggregates();

  NodeIndex owner_ = kNoNode;
  std::uint64_t period_ = 0;
  Entries entries_;
  double sum_p_ = 0.0;
  double max_p_ = 0.0;
};

/// P <- lambda * P + (1 - lambda) * G_f, then L_f = G_f = 0.
void update_popularity(PTableEntry& e, double lambda);

}  // namespace cpepc
