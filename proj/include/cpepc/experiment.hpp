#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpepc/engine.hpp"

namespace cpepc {

/// Reads a run config object. Keys that are absent keep the value from
/// `defaults`; unknown keys are rejected. A relative topology path resolves
/// against `base_dir`.
SimConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir, SimConfig defaults = {});
SimConfig load_config(const std::filesystem::path& path);

nlohmann::json report_to_json(const MetricsReport& m, const SimConfig& config);

struct SweepAxes {
  std::vector<StrategySpec> strategy;
  std::vector<Replacement> replacement;
  std::vector<double> cache_fraction;
  std::vector<double> alpha;
  std::vector<std::size_t> catalog_size;
  std::vector<std::size_t> communities;
  std::vector<double> tau;
  std::vector<double> rho1;
  std::vector<double> rho2;
};

struct ExperimentPlan {
  SimConfig base;
  SweepAxes axes;
  std::size_t repetitions = 1;
  std::uint64_t seed_base = 1;

  /// Cross product of the axes (an empty axis keeps the base value), in a
  /// fixed nesting order with strategy outermost.
  std::vector<SimConfig> points() const;
};

ExperimentPlan parse_plan(const nlohmann::json& j, const std::filesystem::path& base_dir);
ExperimentPlan load_plan(const std::filesystem::path& path);

struct Summary {
  double mean = 0.0;
  double ci = 0.0;  // 95% Student-t half-width; 0 for a single sample
};

/// Mean and 95% half-width t(0.025, n-1) * s / sqrt(n). Identical samples give
/// exactly that value as the mean and a zero half-width.
Summary summarize(std::span<const double> samples);

struct ResultRow {
  std::string strategy;
  std::string replacement;
  double cache_frac = 0.0;
  double alpha = 0.0;
  std::size_t catalog = 0;
  double communities = 0.0;  // mean achieved count, 0 for non-cooperative strategies
  Summary hit_ratio;
  Summary latency_ms;
  Summary hit_distance;
  double messages = 0.0;
  std::uint64_t seed_base = 0;
  std::size_t reps = 0;

  double tau = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  std::optional<std::size_t> community_target;
  double runtime_ms = 0.0;
  bool ci_degenerate = false;
  bool failed = false;
  std::string error;
};

/// Runs every point `repetitions` times (seed = seed_base + r) on up to
/// `workers` threads. Rows come back in points() order regardless of
/// completion order; a point with any failed run becomes a failed row.
std::vector<ResultRow> run_plan(const ExperimentPlan& plan, std::size_t workers);

/// Worker cap from CPEPC_WORKERS, else the hardware concurrency (at least 1).
std::size_t worker_count_from_env();

enum class OutputFormat { kCsv, kJson };
OutputFormat parse_format(std::string_view text);

std::string format_csv(std::span<const ResultRow> rows);
nlohmann::json rows_to_json(std::span<const ResultRow> rows);
/// Writes rows to `path`. Throws on empty input or an unwritable path.
void emit_results(std::span<const ResultRow> rows, OutputFormat format, const std::filesystem::path& path);

std::vector<std::string> figure_names();
/// Sweep recipe for a named figure. scale is "desk" or "full".
ExperimentPlan figure_plan(std::string_view name, const std::filesystem::path& topology, std::string_view scale);

nlohmann::json partition_to_json(const NetworkGraph& g, const CommunityAssignment& a);

}  // namespace cpepc
