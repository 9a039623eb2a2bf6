// wsnopt: sensor placement experiments from the command line.
//
//   wsnopt optimize  --config C --scenario S --algorithm hybrid --nodes 12
//   wsnopt min-nodes --config C --scenario S --algorithm hybrid
//   wsnopt sweep     --config C --algorithms ga,pso,hybrid
//   wsnopt compare   --csv sweep.csv --a hybrid --b ga --metric n_nodes
//   wsnopt verify    --config C --scenario S --deployment report.json
//   wsnopt plot      --config C --scenario S --deployment d.json --out d.svg
//
// Global flags: --seed, --out-dir, --override-rc-check.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wsnopt/commands.hpp"

int main(int argc, char** argv) {
  using namespace wsnopt::cli;

  CLI::App app{"Wireless sensor node placement with GA, PSO and hybrid GA-PSO"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  auto* seed_opt = app.add_option("--seed", seed, "Run seed (overrides the config's seeds)");
  app.add_option("--out-dir", out_dir, "Directory for output files");
  app.add_flag("--override-rc-check", global.override_rc_check,
               "Accept scenarios whose rc is below twice rs");

  OptimizeOptions optimize;
  auto* optimize_cmd = app.add_subcommand("optimize", "Run one engine at a fixed node count");
  optimize_cmd->add_option("--config", optimize.config_path, "Experiment config (JSON)")->required();
  optimize_cmd->add_option("--scenario", optimize.scenario, "Scenario id or index")->required();
  optimize_cmd->add_option("--algorithm", optimize.algorithm, "ga | pso | hybrid | random");
  optimize_cmd->add_option("--nodes", optimize.n_nodes, "Number of nodes")->required();

  MinNodesOptions min_nodes;
  auto* min_cmd = app.add_subcommand("min-nodes", "Search the smallest feasible node count");
  min_cmd->add_option("--config", min_nodes.config_path, "Experiment config (JSON)")->required();
  min_cmd->add_option("--scenario", min_nodes.scenario, "Scenario id or index")->required();
  min_cmd->add_option("--algorithm", min_nodes.algorithm, "ga | pso | hybrid | random");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Minimal node counts for every scenario, algorithm and seed");
  sweep_cmd->add_option("--config", sweep.config_path, "Experiment config (JSON)")->required();
  sweep_cmd->add_option("--algorithms", sweep.algorithms, "Comma separated engines")->delimiter(',');
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads (0 = all cores)");
  sweep_cmd->add_flag("--floor", sweep.floor_display, "Floor summary values to integers (percent for ratios)");

  CompareOptions compare;
  auto* compare_cmd = app.add_subcommand("compare", "Wilcoxon signed-rank test between two algorithms");
  compare_cmd->add_option("--csv", compare.csv_path, "Long-format results CSV")->required();
  compare_cmd->add_option("--csv-b", compare.csv_path_b, "Second CSV holding algorithm b");
  compare_cmd->add_option("--a", compare.algorithm_a, "First algorithm")->required();
  compare_cmd->add_option("--b", compare.algorithm_b, "Second algorithm")->required();
  compare_cmd->add_option("--metric", compare.metric, "n_nodes | coverage | connectivity_ratio | energy_total | fitness | wall_time");
  compare_cmd->add_option("--alternative", compare.alternative, "two-sided | less | greater (for a - b)");
  compare_cmd->add_option("--out", compare.out_path, "Write the result JSON here");

  VerifyOptions verify;
  std::uint64_t verification_seed = 0;
  auto* verify_cmd = app.add_subcommand("verify", "Re-measure a deployment with a fresh sample");
  verify_cmd->add_option("--config", verify.config_path, "Experiment config (JSON)")->required();
  verify_cmd->add_option("--scenario", verify.scenario, "Scenario id or index")->required();
  verify_cmd->add_option("--deployment", verify.deployment_path, "Deployment or report JSON")->required();
  auto* vseed_opt = verify_cmd->add_option("--verification-seed", verification_seed, "Sampler seed");
  verify_cmd->add_option("--samples", verify.samples, "Fresh Monte Carlo samples (>= 1000)");
  verify_cmd->add_option("--out", verify.out_path, "Write the result JSON here");

  PlotOptions plot;
  auto* plot_cmd = app.add_subcommand("plot", "Render a deployment as SVG");
  plot_cmd->add_option("--config", plot.config_path, "Experiment config (JSON)")->required();
  plot_cmd->add_option("--scenario", plot.scenario, "Scenario id or index")->required();
  plot_cmd->add_option("--deployment", plot.deployment_path, "Deployment or report JSON")->required();
  plot_cmd->add_option("--out", plot.out_path, "Output SVG path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*seed_opt) global.seed = seed;
  global.out_dir = out_dir;
  if (*vseed_opt) verify.verification_seed = verification_seed;

  return run_command(
      [&]() -> int {
        if (*optimize_cmd) return cmd_optimize(global, optimize, std::cout);
        if (*min_cmd) return cmd_min_nodes(global, min_nodes, std::cout);
        if (*sweep_cmd) return cmd_sweep(global, sweep, std::cerr);
        if (*compare_cmd) return cmd_compare(global, compare, std::cout);
        if (*verify_cmd) return cmd_verify(global, verify, std::cout);
        if (*plot_cmd) return cmd_plot(global, plot, std::cout);
        return 2;
      },
      std::cerr);
}
