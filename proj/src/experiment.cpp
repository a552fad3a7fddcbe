#include "cpepc/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

namespace cpepc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

template <class T>
T get_as(const json& j, std::string_view key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + std::string(key) + "' has the wrong type");
  }
}

std::size_t get_count(const json& j, std::string_view key) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    throw ConfigError("config key '" + std::string(key) + "' must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

StrategySpec read_strategy(const json& j) {
  if (!j.is_string()) throw ConfigError("strategy must be a string");
  return parse_strategy_spec(j.get<std::string>());
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

SimConfig parse_config(const json& j, const fs::path& base_dir, SimConfig c) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  std::optional<double> prob_p;
  for (const auto& [key, v] : j.items()) {
    if (key == "topology") {
      fs::path p = get_as<std::string>(v, key);
      c.topology = p.is_relative() ? base_dir / p : p;
    } else if (key == "strategy") {
      c.strategy = read_strategy(v);
    } else if (key == "strategy_params") {
      if (!v.is_object()) throw ConfigError("strategy_params must be an object");
      for (const auto& [pk, pv] : v.items()) {
        if (pk != "p") throw ConfigError("unknown strategy parameter '" + pk + "'");
        prob_p = get_as<double>(pv, "strategy_params.p");
      }
    } else if (key == "replacement") {
      c.replacement = parse_replacement(get_as<std::string>(v, key));
    } else if (key == "cache_fraction") {
      c.cache_fraction_pct = get_as<double>(v, key);
    } else if (key == "cache_slots") {
      c.cache_slots = get_count(v, key);
    } else if (key == "catalog_size") {
      c.catalog_size = get_count(v, key);
    } else if (key == "alpha") {
      c.alpha = get_as<double>(v, key);
    } else if (key == "rate") {
      c.rate = get_as<double>(v, key);
    } else if (key == "requests") {
      c.requests = get_count(v, key);
    } else if (key == "warmup") {
      c.warmup = get_count(v, key);
    } else if (key == "period_s") {
      c.period_s = get_as<double>(v, key);
    } else if (key == "tau") {
      c.tau = get_as<double>(v, key);
    } else if (key == "communities") {
      c.community_target = get_count(v, key);
    } else if (key == "rho1") {
      c.rho1 = get_as<double>(v, key);
    } else if (key == "rho2") {
      c.rho2 = get_as<double>(v, key);
    } else if (key == "p_max") {
      c.p_max = get_as<double>(v, key);
    } else if (key == "lambda") {
      c.lambda = get_as<double>(v, key);
    } else if (key == "omega") {
      c.omega = get_as<double>(v, key);
    } else if (key == "seed") {
      c.seed = get_count(v, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (prob_p) {
    if (c.strategy.kind != Strategy::kProb) throw ConfigError("strategy_params.p only applies to prob");
    c.strategy.p = *prob_p;
  }
  if (c.topology.empty()) throw ConfigError("config needs a topology path");
  c.validate();
  return c;
}

SimConfig load_config(const fs::path& path) { return parse_config(read_json_file(path), path.parent_path()); }

json report_to_json(const MetricsReport& m, const SimConfig& c) {
  return json{{"strategy", c.strategy.label()},
              {"replacement", to_string(c.replacement)},
              {"cache_fraction", c.cache_fraction_pct},
              {"cache_capacity", m.cache_capacity},
              {"catalog_size", c.catalog_size},
              {"alpha", c.alpha},
              {"seed", c.seed},
              {"measured_requests", m.measured_requests},
              {"cache_hits", m.cache_hits},
              {"source_hits", m.source_hits},
              {"cache_hit_ratio", m.cache_hit_ratio},
              {"avg_latency_ms", m.avg_latency_ms},
              {"avg_hit_distance", m.avg_hit_distance},
              {"message_count", m.message_count},
              {"interest_hops", m.interest_hops},
              {"data_hops", m.data_hops},
              {"control_hops", m.control_hops},
              {"ptable_hops", m.ptable_hops},
              {"ptable_transfers", m.ptable_transfers},
              {"achieved_community_count", m.achieved_community_count},
              {"target_community_count", m.target_community_count},
              {"resolution", m.resolution},
              {"runtime_ms", m.runtime_ms},
              {"events", m.events},
              {"causality_violations", m.causality_violations},
              {"redundancy_checks", m.redundancy_checks},
              {"redundancy_violations", m.redundancy_violations}};
}

std::vector<SimConfig> ExperimentPlan::points() const {
  std::vector<SimConfig> out{base};
  auto expand = [&out](const auto& values, auto apply) {
    if (values.empty()) return;
    std::vector<SimConfig> next;
    next.reserve(out.size() * values.size());
    for (const auto& c : out) {
      for (const auto& v : values) {
        SimConfig copy = c;
        apply(copy, v);
        next.push_back(std::move(copy));
      }
    }
    out = std::move(next);
  };
  expand(axes.strategy, [](SimConfig& c, const StrategySpec& v) { c.strategy = v; });
  expand(axes.replacement, [](SimConfig& c, Replacement v) { c.replacement = v; });
  expand(axes.catalog_size, [](SimConfig& c, std::size_t v) { c.catalog_size = v; });
  expand(axes.cache_fraction, [](SimConfig& c, double v) { c.cache_fraction_pct = v; });
  expand(axes.alpha, [](SimConfig& c, double v) { c.alpha = v; });
  expand(axes.communities, [](SimConfig& c, std::size_t v) { c.community_target = v; });
  expand(axes.tau, [](SimConfig& c, double v) { c.tau = v; });
  expand(axes.rho1, [](SimConfig& c, double v) { c.rho1 = v; });
  expand(axes.rho2, [](SimConfig& c, double v) { c.rho2 = v; });
  return out;
}

ExperimentPlan parse_plan(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("plan must be a JSON object");
  ExperimentPlan plan;
  if (!j.contains("base")) throw ConfigError("plan needs a base config");
  for (const auto& [key, v] : j.items()) {
    if (key == "base") {
      plan.base = parse_config(v, base_dir);
    } else if (key == "repetitions") {
      plan.repetitions = get_count(v, key);
    } else if (key == "seed_base") {
      plan.seed_base = get_count(v, key);
    } else if (key == "axes") {
      if (!v.is_object()) throw ConfigError("axes must be an object");
      for (const auto& [axis, values] : v.items()) {
        if (!values.is_array() || values.empty()) throw ConfigError("axis '" + axis + "' must be a non-empty list");
        auto& a = plan.axes;
        for (const auto& x : values) {
          if (axis == "strategy") {
            a.strategy.push_back(read_strategy(x));
          } else if (axis == "replacement") {
            a.replacement.push_back(parse_replacement(get_as<std::string>(x, axis)));
          } else if (axis == "cache_fraction") {
            a.cache_fraction.push_back(get_as<double>(x, axis));
          } else if (axis == "alpha") {
            a.alpha.push_back(get_as<double>(x, axis));
          } else if (axis == "catalog_size") {
            a.catalog_size.push_back(get_count(x, axis));
          } else if (axis == "communities") {
            a.communities.push_back(get_count(x, axis));
          } else if (axis == "tau") {
            a.tau.push_back(get_as<double>(x, axis));
          } else if (axis == "rho1") {
            a.rho1.push_back(get_as<double>(x, axis));
          } else if (axis == "rho2") {
            a.rho2.push_back(get_as<double>(x, axis));
          } else {
            throw ConfigError("unknown sweep axis '" + axis + "'");
          }
        }
      }
    } else {
      throw ConfigError("unknown plan key '" + key + "'");
    }
  }
  if (plan.repetitions < 1) throw ConfigError("repetitions must be at least 1");
  for (const auto& c : plan.points()) c.validate();
  return plan;
}

ExperimentPlan load_plan(const fs::path& path) { return parse_plan(read_json_file(path), path.parent_path()); }

Summary summarize(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("summarize needs at least one sample");
  // Welford: exact when all samples are equal
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (const double x : samples) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  Summary s{mean, 0.0};
  if (n < 2 || m2 <= 0.0) return s;
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  s.ci = t * std::sqrt(m2 / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
  return s;
}

std::size_t worker_count_from_env() {
  if (const char* env = std::getenv("CPEPC_WORKERS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError("CPEPC_WORKERS must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ResultRow> run_plan(const ExperimentPlan& plan, std::size_t workers) {
  const auto points = plan.points();
  const std::size_t reps = plan.repetitions;

  struct Network {
    std::shared_ptr<const NetworkGraph> graph;
    std::shared_ptr<const RouteTable> routes;
    std::string error;
  };
  std::map<fs::path, Network> networks;
  for (const auto& c : points) {
    if (networks.contains(c.topology)) continue;
    Network n;
    try {
      n.graph = std::make_shared<const NetworkGraph>(with_endpoints(load_topology(c.topology)));
      n.routes = std::make_shared<const RouteTable>(*n.graph);
    } catch (const std::exception& e) {
      n.error = e.what();
    }
    networks.emplace(c.topology, std::move(n));
  }

  const std::size_t jobs = points.size() * reps;
  std::vector<std::optional<MetricsReport>> reports(jobs);
  std::vector<std::string> errors(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      SimConfig c = points[job / reps];
      c.seed = plan.seed_base + job % reps;
      const auto& net = networks.at(c.topology);
      if (!net.error.empty()) {
        errors[job] = net.error;
        continue;
      }
      try {
        Simulator sim(net.graph, net.routes, c);
        reports[job] = sim.run();
      } catch (const std::exception& e) {
        errors[job] = e.what();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(workers, jobs));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<ResultRow> rows;
  rows.reserve(points.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& c = points[i];
    ResultRow row;
    row.strategy = c.strategy.label();
    row.replacement = std::string(to_string(c.replacement));
    row.cache_frac = c.cache_fraction_pct;
    row.alpha = c.alpha;
    row.catalog = c.catalog_size;
    row.seed_base = plan.seed_base;
    row.reps = reps;
    row.tau = c.tau;
    row.rho1 = c.rho1;
    row.rho2 = c.rho2;
    row.community_target = c.community_target;
    row.ci_degenerate = reps < 2;

    std::vector<double> hit, lat, dist, msgs, comms, runtime;
    for (std::size_t r = 0; r < reps; ++r) {
      const std::size_t job = i * reps + r;
      if (!reports[job]) {
        row.failed = true;
        if (row.error.empty()) row.error = errors[job];
        continue;
      }
      const auto& m = *reports[job];
      hit.push_back(m.cache_hit_ratio);
      lat.push_back(m.avg_latency_ms);
      dist.push_back(m.avg_hit_distance);
      msgs.push_back(static_cast<double>(m.message_count));
      comms.push_back(static_cast<double>(m.achieved_community_count));
      runtime.push_back(m.runtime_ms);
    }
    if (row.failed) {
      row.communities = row.messages = row.runtime_ms = nan;
      row.hit_ratio = row.latency_ms = row.hit_distance = Summary{nan, nan};
    } else {
      row.hit_ratio = summarize(hit);
      row.latency_ms = summarize(lat);
      row.hit_distance = summarize(dist);
      row.messages = summarize(msgs).mean;
      row.communities = summarize(comms).mean;
      row.runtime_ms = summarize(runtime).mean;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

OutputFormat parse_format(std::string_view text) {
  if (text == "csv") return OutputFormat::kCsv;
  if (text == "json") return OutputFormat::kJson;
  throw ConfigError("unknown output format '" + std::string(text) + "' (expected csv or json)");
}

std::string format_csv(std::span<const ResultRow> rows) {
  std::ostringstream out;
  out << "strategy,replacement,cache_frac,alpha,catalog,communities,hit_ratio,hit_ratio_ci,latency_ms,latency_ci,"
         "hit_distance,hit_distance_ci,messages,seed_base,reps\n";
  for (const auto& r : rows) {
    out << r.strategy << ',' << r.replacement << ',' << fmt6(r.cache_frac) << ',' << fmt6(r.alpha) << ','
        << r.catalog << ',' << fmt6(r.communities) << ',' << fmt6(r.hit_ratio.mean) << ',' << fmt6(r.hit_ratio.ci)
        << ',' << fmt6(r.latency_ms.mean) << ',' << fmt6(r.latency_ms.ci) << ',' << fmt6(r.hit_distance.mean) << ','
        << fmt6(r.hit_distance.ci) << ',' << fmt6(r.messages) << ',' << r.seed_base << ',' << r.reps << '\n';
  }
  return out.str();
}

json rows_to_json(std::span<const ResultRow> rows) {
  // Numbers go through the same 6-significant-digit rounding as the CSV;
  // NaN (failed rows) becomes null.
  auto num = [](double v) -> json {
    if (!std::isfinite(v)) return nullptr;
    return std::stod(fmt6(v));
  };
  json out = json::array();
  for (const auto& r : rows) {
    json row{{"strategy", r.strategy},
             {"replacement", r.replacement},
             {"cache_frac", num(r.cache_frac)},
             {"alpha", num(r.alpha)},
             {"catalog", r.catalog},
             {"communities", num(r.communities)},
             {"hit_ratio", num(r.hit_ratio.mean)},
             {"hit_ratio_ci", num(r.hit_ratio.ci)},
             {"latency_ms", num(r.latency_ms.mean)},
             {"latency_ci", num(r.latency_ms.ci)},
             {"hit_distance", num(r.hit_distance.mean)},
             {"hit_distance_ci", num(r.hit_distance.ci)},
             {"messages", num(r.messages)},
             {"seed_base", r.seed_base},
             {"reps", r.reps},
             {"ci_degenerate", r.ci_degenerate},
             {"failed", r.failed}};
    if (r.failed) row["error"] = r.error;
    out.push_back(std::move(row));
  }
  return out;
}

void emit_results(std::span<const ResultRow> rows, OutputFormat format, const fs::path& path) {
  if (rows.empty()) throw std::invalid_argument("no result rows to write");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  if (format == OutputFormat::kCsv) {
    out << format_csv(rows);
  } else {
    out << rows_to_json(rows).dump(2) << '\n';
  }
  if (!out.flush()) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::vector<std::string> figure_names() { return {"fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig13"}; }

ExperimentPlan figure_plan(std::string_view name, const fs::path& topology, std::string_view scale) {
  const auto names = figure_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown figure '" + std::string(name) + "' (valid: " + list + ")");
  }
  if (scale != "desk" && scale != "full") throw ConfigError("scale must be desk or full");
  const bool desk = scale == "desk";

  ExperimentPlan plan;
  plan.repetitions = 10;
  plan.seed_base = 1;
  plan.base.topology = topology;
  if (desk) {
    plan.base.catalog_size = 1'000;
    plan.base.requests = 10'000;
    plan.base.warmup = 5'000;
  }
  plan.base.alpha = 0.8;
  plan.base.cache_fraction_pct = 0.1;
  const std::vector<StrategySpec> all{{Strategy::kCpepc}, {Strategy::kPepc}, {Strategy::kLce}, {Strategy::kProb, 0.5}};
  const std::vector<double> fractions{0.05, 0.1, 0.15, 0.2, 0.25};

  plan.axes.strategy = all;
  if (name == "fig5" || name == "fig6" || name == "fig7" || name == "fig13") {
    plan.axes.cache_fraction = fractions;
  } else if (name == "fig8") {
    plan.axes.alpha = {0.6, 0.8, 1.0, 1.2};
  } else if (name == "fig9") {
    plan.base.cache_slots = 10;
    plan.axes.catalog_size = {1'000, 2'000, 5'000, 10'000, 20'000};
    if (desk) {
      for (auto& n : plan.axes.catalog_size) n /= 10;
    }
  } else if (name == "fig10") {
    plan.axes.strategy = {{Strategy::kCpepc}};
    plan.axes.communities = {10, 20, 30, 40, 50};
  }
  return plan;
}

json partition_to_json(const NetworkGraph& g, const CommunityAssignment& a) {
  json communities = json::array();
  for (CommunityId c = 0; c < a.size(); ++c) {
    json members = json::array();
    for (const NodeIndex v : a.communities[c]) members.push_back(g.id(v));
    communities.push_back({{"id", c}, {"leader", g.id(a.leaders[c])}, {"routers", std::move(members)}});
  }
  json membership = json::object();
  for (const auto& [v, c] : a.membership) membership[g.id(v)] = c;
  return json{{"node_count", g.node_count()},
              {"router_count", g.routers().size()},
              {"target_count", a.target_count},
              {"achieved_count", a.size()},
              {"resolution", a.resolution},
              {"modularity", a.modularity_score},
              {"communities", std::move(communities)},
              {"membership", std::move(membership)}};
}

}  // namespace cpepc
