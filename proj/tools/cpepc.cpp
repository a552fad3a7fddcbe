// Command-line front end: single runs, sweeps, partitions and figure recipes.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cpepc/experiment.hpp"

namespace {

using namespace cpepc;

int finish(const std::vector<ResultRow>& rows, const std::string& format, const std::string& out_path) {
  const auto fmt = parse_format(format);
  if (out_path.empty() || out_path == "-") {
    if (fmt == OutputFormat::kCsv) {
      std::cout << format_csv(rows);
    } else {
      std::cout << rows_to_json(rows).dump(2) << '\n';
    }
  } else {
    emit_results(rows, fmt, out_path);
  }
  int failed = 0;
  for (const auto& r : rows) {
    if (r.failed) {
      ++failed;
      std::cerr << "failed: " << r.strategy << " cache=" << r.cache_frac << " alpha=" << r.alpha
                << " catalog=" << r.catalog << ": " << r.error << '\n';
    }
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative NDN caching simulator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one simulation and print its metrics as JSON");
  run->add_option("config", config_path, "run config (JSON)")->required()->check(CLI::ExistingFile);

  std::string plan_path, format = "csv", out_path;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep with repetitions");
  sweep->add_option("plan", plan_path, "sweep plan (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--format", format, "csv or json")->capture_default_str();
  sweep->add_option("-o,--output", out_path, "output file (default: stdout)");

  std::string topo_path;
  double tau = 0.15;
  std::size_t target = 0;
  std::uint64_t seed = 1;
  auto* partition = app.add_subcommand("partition", "Detect communities and leaders of a topology");
  partition->add_option("topology", topo_path, "topology (JSON)")->required()->check(CLI::ExistingFile);
  partition->add_option("--tau", tau, "community fraction of the node count")->capture_default_str();
  partition->add_option("--communities", target, "explicit community target (overrides --tau)");
  partition->add_option("--seed", seed, "run seed")->capture_default_str();

  std::string figure, scale = "desk";
  std::size_t reps = 0;
  auto* reproduce = app.add_subcommand("reproduce", "Run a named figure sweep");
  reproduce->add_option("figure", figure, "recipe name")->required();
  reproduce->add_option("--topology", topo_path, "topology (JSON)")->required()->check(CLI::ExistingFile);
  reproduce->add_option("--scale", scale, "desk or full")->capture_default_str();
  reproduce->add_option("--reps", reps, "override the repetition count");
  reproduce->add_option("--format", format, "csv or json")->capture_default_str();
  reproduce->add_option("-o,--output", out_path, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto config = load_config(config_path);
      const auto report = cpepc::run(config);
      std::cout << report_to_json(report, config).dump(2) << '\n';
      return 0;
    }
    if (*sweep) {
      const auto plan = load_plan(plan_path);
      return finish(run_plan(plan, worker_count_from_env()), format, out_path);
    }
    if (*partition) {
      const auto graph = with_endpoints(load_topology(topo_path));
      CommunityParams params;
      params.tau = tau;
      if (target > 0) params.target_count = target;
      const auto assignment = detect_communities(graph, params, stream_seed(seed, Stream::kCommunity));
      std::cout << partition_to_json(graph, assignment).dump(2) << '\n';
      return 0;
    }
    if (*reproduce) {
      auto plan = figure_plan(figure, topo_path, scale);
      if (reps > 0) plan.repetitions = reps;
      return finish(run_plan(plan, worker_count_from_env()), format, out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
