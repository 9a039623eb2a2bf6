#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "wsnopt/config.hpp"
#include "wsnopt/error.hpp"
#include "wsnopt/optimizers.hpp"
#include "wsnopt/results.hpp"
#include "wsnopt/search.hpp"
#include "wsnopt/stats.hpp"

// Subcommand bodies behind the wsnopt CLI. Each returns a process exit code;
// library exceptions are mapped by run_command().
namespace wsnopt::cli {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  fs::path out_dir = ".";
  bool override_rc_check = false;
};

struct OptimizeOptions {
  std::string config_path;
  std::string scenario;
  std::string algorithm = "hybrid";
  std::size_t n_nodes = 0;
};

struct MinNodesOptions {
  std::string config_path;
  std::string scenario;
  std::string algorithm = "hybrid";
};

struct SweepOptions {
  std::string config_path;
  std::vector<std::string> algorithms{"ga", "pso", "hybrid"};
  std::size_t jobs = 0;  // 0: hardware concurrency
  bool floor_display = false;
};

struct CompareOptions {
  std::string csv_path;
  std::string csv_path_b;  // optional second file holding algorithm b
  std::string algorithm_a;
  std::string algorithm_b;
  std::string metric = "n_nodes";
  std::string alternative = "two-sided";
  std::string out_path;
};

struct VerifyOptions {
  std::string config_path;
  std::string scenario;
  std::string deployment_path;
  std::optional<std::uint64_t> verification_seed;
  std::size_t samples = 10000;
  std::string out_path;
};

struct PlotOptions {
  std::string config_path;
  std::string scenario;
  std::string deployment_path;
  std::string out_path;
};

inline Engine engine_or_throw(const std::string& name) {
  const auto e = parse_engine(name);
  if (!e) throw ConfigError("unknown algorithm '" + name + "' (expected ga, pso, hybrid or random)");
  return *e;
}

inline std::uint64_t pick_seed(const GlobalOptions& g, const ExperimentConfig& c) {
  if (g.seed) return *g.seed;
  if (c.seeds.empty()) throw ConfigError("field 'seeds': at least one seed is required");
  return c.seeds.front();
}

inline std::string file_stem(const std::string& scenario, const std::string& algorithm,
                             std::size_t n, std::uint64_t seed) {
  std::string stem = algorithm + "_" + scenario;
  if (n) stem += "_n" + std::to_string(n);
  return stem + "_s" + std::to_string(seed);
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string history_csv(const RunState& state) {
  std::string out = "generation,best_fitness\n";
  for (std::size_t t = 0; t < state.fitness_history.size(); ++t)
    out += std::to_string(t) + "," + detail::printf_double("%.9f", state.fitness_history[t]) + "\n";
  return out;
}

inline nlohmann::json load_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": malformed JSON at " + detail::line_column(text, e.byte));
  }
}

// Accepts either a bare [[x, y], ...] array or a min-nodes report object.
inline Deployment load_deployment(const nlohmann::json& j) {
  if (j.is_object()) {
    if (!j.contains("deployment")) throw ConfigError("report has no 'deployment' field");
    return deployment_from_json(j.at("deployment"));
  }
  return deployment_from_json(j);
}

// ---------------------------------------------------------------------------

inline int cmd_optimize(const GlobalOptions& g, const OptimizeOptions& o, std::ostream& log) {
  const ExperimentConfig config = load_config(o.config_path);
  const Engine engine = engine_or_throw(o.algorithm);
  if (o.n_nodes < 1) throw ConfigError("--nodes must be at least 1");
  const ScenarioEntry& entry = find_scenario(config, o.scenario);
  const Scenario scenario =
      make_scenario(entry, config.energy, g.override_rc_check || config.override_rc_check);

  OptimizerConfig opt = config.optimizer;
  opt.seed = pick_seed(g, config);
  const auto t0 = std::chrono::steady_clock::now();
  const CoverageSampler sampler(scenario.region, opt.monte_carlo_samples,
                                derive_seed(opt.seed, stream::sampler));
  const FitnessObjective objective(scenario, sampler, config.weights);
  const RunState state = run_engine(engine, o.n_nodes, scenario.region, objective, opt);
  const double wall = seconds_since(t0);

  const Evaluation ev = objective.evaluate(state.global_best);
  const Verification v = verify_deployment(state.global_best, scenario, verification_seed_for(opt.seed),
                                           config.search.verify_samples);
  RunRecord rec;
  rec.scenario = entry.id;
  rec.algorithm = std::string(to_string(engine));
  rec.seed = opt.seed;
  rec.n_nodes = o.n_nodes;
  rec.coverage = v.coverage;
  rec.connectivity_ratio = v.connectivity_ratio;
  rec.is_connected = v.is_connected;
  rec.energy_total = ev.energy_total;
  rec.fitness = ev.fitness;
  rec.generations_used = state.generation;
  rec.wall_time = wall;

  const std::string stem = file_stem(entry.id, rec.algorithm, o.n_nodes, opt.seed);
  write_file(g.out_dir / (stem + ".json"), deployment_to_json(state.global_best));
  write_file(g.out_dir / (stem + ".history.csv"), history_csv(state));
  write_file(g.out_dir / (stem + ".svg"), render_svg(state.global_best, scenario));
  append_run_records(g.out_dir / "runs.csv", {rec});

  log << rec.algorithm << " " << entry.id << " n=" << o.n_nodes << " seed=" << opt.seed
      << " coverage=" << detail::printf_double("%.4f", v.coverage)
      << " search_coverage=" << detail::printf_double("%.4f", ev.coverage)
      << " connected=" << (v.is_connected ? "yes" : "no")
      << " energy=" << detail::printf_double("%.4e", ev.energy_total)
      << " fitness=" << detail::printf_double("%.6f", ev.fitness)
      << " generations=" << state.generation << " time=" << detail::printf_double("%.2f", wall)
      << "s\n";
  return 0;
}

inline RunRecord report_record(const FeasibilityReport& r, const std::string& scenario,
                               const std::string& algorithm, std::uint64_t seed) {
  RunRecord rec;
  rec.scenario = scenario;
  rec.algorithm = algorithm;
  rec.seed = seed;
  rec.n_nodes = r.n;
  rec.coverage = r.verified_coverage;
  rec.connectivity_ratio = r.connectivity_ratio;
  rec.is_connected = r.is_connected;
  rec.energy_total = r.evaluation.energy_total;
  rec.fitness = r.evaluation.fitness;
  rec.generations_used = r.generations_used;
  rec.wall_time = r.wall_time;
  return rec;
}

inline int cmd_min_nodes(const GlobalOptions& g, const MinNodesOptions& o, std::ostream& log) {
  const ExperimentConfig config = load_config(o.config_path);
  const Engine engine = engine_or_throw(o.algorithm);
  const ScenarioEntry& entry = find_scenario(config, o.scenario);
  const Scenario scenario =
      make_scenario(entry, config.energy, g.override_rc_check || config.override_rc_check);
  OptimizerConfig opt = config.optimizer;
  opt.seed = pick_seed(g, config);

  const FeasibilityReport report = find_min_nodes(scenario, engine, config.weights, opt, config.search);
  const std::string algorithm(to_string(engine));
  const std::string stem = file_stem(entry.id, algorithm, 0, opt.seed);
  write_file(g.out_dir / (stem + ".report.json"),
             report_to_json(report, entry.id, algorithm, config.search.verify_samples).dump(2) + "\n");
  append_run_records(g.out_dir / "min_nodes.csv", {report_record(report, entry.id, algorithm, opt.seed)});

  log << algorithm << " " << entry.id << " seed=" << opt.seed << " min_nodes=" << report.n
      << " (lower bound " << analytic_lower_bound(scenario) << ")"
      << " coverage=" << detail::printf_double("%.4f", report.verified_coverage)
      << " connected=" << (report.is_connected ? "yes" : "no") << " attempts=" << report.attempts
      << " time=" << detail::printf_double("%.2f", report.wall_time) << "s\n";
  return 0;
}

// Rows: scenarios in config order. Columns: algorithms in request order.
// Cells: mean minimal node count over successful seeds, "NA" when none.
inline std::string pivot_table(const std::vector<RunRecord>& records,
                               const std::vector<std::string>& scenarios,
                               const std::vector<std::string>& algorithms) {
  std::vector<std::string> header{"scenario"};
  header.insert(header.end(), algorithms.begin(), algorithms.end());
  std::string out = csv::join(header) + "\n";
  for (const std::string& s : scenarios) {
    std::vector<std::string> row{s};
    for (const std::string& a : algorithms) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const RunRecord& r : records)
        if (r.ok() && r.scenario == s && r.algorithm == a) {
          sum += static_cast<double>(r.n_nodes);
          ++count;
        }
      row.push_back(count ? detail::printf_double("%.2f", sum / static_cast<double>(count)) : "NA");
    }
    out += csv::join(row) + "\n";
  }
  return out;
}

inline std::string summary_table(const std::vector<RunRecord>& records, bool floor_display) {
  std::vector<RunRecord> ok;
  for (const RunRecord& r : records)
    if (r.ok()) ok.push_back(r);
  std::string out =
      "scenario,algorithm,count,n_nodes_mean,n_nodes_sd,n_nodes_min,n_nodes_max,coverage_mean,"
      "coverage_sd,connectivity_mean,energy_mean,wall_time_mean\n";
  if (ok.empty()) return out;
  const GroupKey keys[] = {GroupKey::scenario, GroupKey::algorithm};
  auto fmt = [&](double v, const char* spec) {
    return floor_display ? std::to_string(static_cast<long long>(std::floor(v)))
                         : detail::printf_double(spec, v);
  };
  for (const GroupSummary& g : summarize_runs(ok, keys)) {
    out += csv::join({g.key[0], g.key[1], std::to_string(g.count), fmt(g.n_nodes.mean, "%.2f"),
                      fmt(g.n_nodes.sd, "%.2f"), fmt(g.n_nodes.min, "%.0f"), fmt(g.n_nodes.max, "%.0f"),
                      fmt(floor_display ? 100.0 * g.coverage.mean : g.coverage.mean, "%.6f"),
                      fmt(floor_display ? 100.0 * g.coverage.sd : g.coverage.sd, "%.6f"),
                      fmt(floor_display ? 100.0 * g.connectivity_ratio.mean : g.connectivity_ratio.mean,
                          "%.6f"),
                      detail::printf_double("%.6e", g.energy_total.mean),
                      fmt(g.wall_time.mean, "%.3f")}) +
           "\n";
  }
  return out;
}

inline int cmd_sweep(const GlobalOptions& g, const SweepOptions& o, std::ostream& log) {
  const ExperimentConfig config = load_config(o.config_path);
  if (config.scenarios.empty()) throw ConfigError("field 'scenarios': sweep needs at least one scenario");
  if (o.algorithms.empty()) throw ConfigError("sweep needs at least one algorithm");
  std::vector<Engine> engines;
  for (const std::string& a : o.algorithms) engines.push_back(engine_or_throw(a));
  std::vector<std::uint64_t> seeds = g.seed ? std::vector<std::uint64_t>{*g.seed} : config.seeds;
  if (seeds.empty()) throw ConfigError("field 'seeds': sweep needs at least one seed");
  const bool override_rc = g.override_rc_check || config.override_rc_check;

  std::vector<Scenario> scenarios;
  for (const ScenarioEntry& e : config.scenarios)
    scenarios.push_back(make_scenario(e, config.energy, override_rc));

  struct Cell {
    std::size_t scenario, engine;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < scenarios.size(); ++s)
    for (std::size_t e = 0; e < engines.size(); ++e)
      for (std::uint64_t seed : seeds) cells.push_back({s, e, seed});

  std::vector<RunRecord> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      const ScenarioEntry& entry = config.scenarios[c.scenario];
      const std::string algorithm(to_string(engines[c.engine]));
      OptimizerConfig opt = config.optimizer;
      opt.seed = c.seed;
      const auto t0 = std::chrono::steady_clock::now();
      RunRecord rec;
      try {
        const FeasibilityReport r =
            find_min_nodes(scenarios[c.scenario], engines[c.engine], config.weights, opt, config.search);
        rec = report_record(r, entry.id, algorithm, c.seed);
      } catch (const SearchExhausted&) {
        rec.scenario = entry.id;
        rec.algorithm = algorithm;
        rec.seed = c.seed;
        rec.status = "exhausted";
        rec.wall_time = seconds_since(t0);
      }
      results[i] = rec;
      const std::lock_guard lock(log_mutex);
      log << "[" << (i + 1) << "/" << cells.size() << "] " << rec.algorithm << " " << rec.scenario
          << " seed=" << rec.seed << " " << rec.status << " n=" << rec.n_nodes << "\n";
    }
  };
  std::size_t jobs = o.jobs ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, cells.size());
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::vector<std::string> scenario_ids;
  for (const ScenarioEntry& e : config.scenarios) scenario_ids.push_back(e.id);
  std::vector<std::string> algorithm_names;
  for (Engine e : engines) algorithm_names.emplace_back(to_string(e));

  write_file(g.out_dir / "sweep.csv", format_run_records(results));
  write_file(g.out_dir / "pivot.csv", pivot_table(results, scenario_ids, algorithm_names));
  write_file(g.out_dir / "summary.csv", summary_table(results, o.floor_display));

  const auto succeeded = std::count_if(results.begin(), results.end(), [](const RunRecord& r) { return r.ok(); });
  log << "sweep: " << succeeded << " of " << results.size() << " cells succeeded\n";
  if (succeeded == 0) throw SearchExhausted("every sweep cell exhausted its search");
  return 0;
}

inline double metric_value(const RunRecord& r, const std::string& metric) {
  if (metric == "n_nodes") return static_cast<double>(r.n_nodes);
  if (metric == "coverage") return r.coverage;
  if (metric == "connectivity_ratio") return r.connectivity_ratio;
  if (metric == "energy_total") return r.energy_total;
  if (metric == "fitness") return r.fitness;
  if (metric == "wall_time") return r.wall_time;
  throw ConfigError("unknown metric '" + metric +
                    "' (expected n_nodes, coverage, connectivity_ratio, energy_total, fitness or wall_time)");
}

// Pairs rows of algorithms a and b on (scenario, seed). Any unmatched or
// failed cell is a pairing error.
inline PairedSample pair_records(const std::vector<RunRecord>& rows_a, const std::vector<RunRecord>& rows_b,
                                 const std::string& a, const std::string& b, const std::string& metric) {
  using Key = std::pair<std::string, std::uint64_t>;
  auto collect = [&](const std::vector<RunRecord>& rows, const std::string& algorithm) {
    std::map<Key, const RunRecord*> out;
    for (const RunRecord& r : rows) {
      if (r.algorithm != algorithm) continue;
      if (!out.emplace(Key{r.scenario, r.seed}, &r).second)
        throw TestError("duplicate row for " + algorithm + " on " + r.scenario + " seed " +
                        std::to_string(r.seed));
    }
    return out;
  };
  const auto ma = collect(rows_a, a);
  const auto mb = collect(rows_b, b);
  if (ma.empty()) throw TestError("no rows for algorithm '" + a + "'");
  if (mb.empty()) throw TestError("no rows for algorithm '" + b + "'");
  std::vector<double> va, vb;
  for (const auto& [key, ra] : ma) {
    const auto it = mb.find(key);
    if (it == mb.end())
      throw TestError("pairing incomplete: " + b + " has no row for " + key.first + " seed " +
                      std::to_string(key.second));
    if (!ra->ok() || !it->second->ok())
      throw TestError("pairing incomplete: failed cell for " + key.first + " seed " + std::to_string(key.second));
    va.push_back(metric_value(*ra, metric));
    vb.push_back(metric_value(*it->second, metric));
  }
  if (mb.size() != ma.size()) throw TestError("pairing incomplete: " + b + " has cells that " + a + " lacks");
  return PairedSample::from_pairs(a, b, va, vb);
}

inline std::string verdict(const WilcoxonResult& w, const PairedSample& s, const std::string& metric) {
  std::string direction;
  if (w.w_plus > w.w_minus) direction = s.label_a + " higher";
  else if (w.w_plus < w.w_minus) direction = s.label_a + " lower";
  else direction = "no direction";
  return s.label_a + " vs " + s.label_b + " on " + metric + ": W=" + detail::printf_double("%g", w.w_statistic) +
         " n=" + std::to_string(w.n_effective) + " p=" + detail::printf_double("%.6g", w.p_value) + " (" +
         std::string(to_string(w.method)) + ", " + std::string(to_string(w.alternative)) + ", " + direction +
         ") -> " + (w.p_value < 0.05 ? "significant at 0.05" : "not significant at 0.05");
}

inline int cmd_compare(const GlobalOptions&, const CompareOptions& o, std::ostream& log) {
  const auto alternative = parse_alternative(o.alternative);
  if (!alternative) throw ConfigError("unknown alternative '" + o.alternative + "'");
  metric_value(RunRecord{}, o.metric);
  const auto rows_a = parse_run_records(read_text_file(o.csv_path));
  const auto rows_b = o.csv_path_b.empty() ? rows_a : parse_run_records(read_text_file(o.csv_path_b));
  const PairedSample sample = pair_records(rows_a, rows_b, o.algorithm_a, o.algorithm_b, o.metric);
  const WilcoxonResult w = wilcoxon_signed_rank(sample, *alternative);
  nlohmann::json j = wilcoxon_to_json(w, sample, o.metric);
  const std::string line = verdict(w, sample, o.metric);
  j["verdict"] = line;
  if (!o.out_path.empty()) write_file(o.out_path, j.dump(2) + "\n");
  log << line << "\n";
  return 0;
}

inline int cmd_verify(const GlobalOptions& g, const VerifyOptions& o, std::ostream& log) {
  const ExperimentConfig config = load_config(o.config_path);
  const ScenarioEntry& entry = find_scenario(config, o.scenario);
  const Scenario scenario =
      make_scenario(entry, config.energy, g.override_rc_check || config.override_rc_check);
  const nlohmann::json doc = load_json_file(o.deployment_path);
  const Deployment d = load_deployment(doc);
  for (const Point& p : d.nodes)
    if (!scenario.region.contains(p)) throw ConfigError("deployment node lies outside the region");

  std::uint64_t vseed = 0;
  if (o.verification_seed) vseed = *o.verification_seed;
  else if (doc.is_object() && doc.contains("verification_seed")) vseed = doc.at("verification_seed").get<std::uint64_t>();
  else vseed = verification_seed_for(pick_seed(g, config));
  std::size_t samples = o.samples;
  if (!o.verification_seed && doc.is_object() && doc.contains("verify_samples"))
    samples = doc.at("verify_samples").get<std::size_t>();
  if (samples < 1000) throw ConfigError("--samples must be at least 1000");

  const Verification v = verify_deployment(d, scenario, vseed, samples);
  const nlohmann::json out = {{"scenario", entry.id},
                              {"n", d.size()},
                              {"coverage", v.coverage},
                              {"connectivity_ratio", v.connectivity_ratio},
                              {"is_connected", v.is_connected},
                              {"per_node_energy_ok", v.per_node_energy_ok},
                              {"energy_total", total_energy(d, scenario)},
                              {"verification_seed", vseed},
                              {"samples", samples}};
  if (!o.out_path.empty()) write_file(o.out_path, out.dump(2) + "\n");
  log << out.dump() << "\n";
  return 0;
}

inline int cmd_plot(const GlobalOptions& g, const PlotOptions& o, std::ostream& log) {
  const ExperimentConfig config = load_config(o.config_path);
  const ScenarioEntry& entry = find_scenario(config, o.scenario);
  const Scenario scenario =
      make_scenario(entry, config.energy, g.override_rc_check || config.override_rc_check);
  const Deployment d = load_deployment(load_json_file(o.deployment_path));
  const fs::path out = o.out_path.empty() ? g.out_dir / (entry.id + ".svg") : fs::path(o.out_path);
  write_file(out, render_svg(d, scenario));
  log << "wrote " << out.string() << "\n";
  return 0;
}

// Maps library failures onto the documented exit codes.
template <class Fn>
int run_command(Fn&& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::config);
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::config);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::io);
  }
}

}  // namespace wsnopt::cli
