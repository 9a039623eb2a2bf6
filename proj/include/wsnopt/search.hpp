#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "wsnopt/error.hpp"
#include "wsnopt/evaluation.hpp"
#include "wsnopt/optimizers.hpp"

namespace wsnopt {

struct SearchConfig {
  std::size_t retries_per_n = 3;
  // Allowed shortfall of the fresh coverage estimate below the target.
  double mc_tolerance = 0.02;
  std::size_t verify_samples = 10000;

  void validate() const {
    if (retries_per_n < 1) throw std::invalid_argument("retries per n must be at least 1");
    if (!(mc_tolerance >= 0.0) || mc_tolerance >= 1.0)
      throw std::invalid_argument("mc tolerance must lie in [0, 1)");
    if (verify_samples < 1000) throw std::invalid_argument("verification needs at least 1000 samples");
  }

  friend bool operator==(const SearchConfig&, const SearchConfig&) = default;
};

struct Verification {
  double coverage = 0.0;
  double connectivity_ratio = 0.0;
  bool is_connected = false;
  bool per_node_energy_ok = true;
};

// Independent re-measurement from coordinates alone: fresh coverage sample,
// connectivity, and the per-node energy cap on the routing backbone.
inline Verification verify_deployment(const Deployment& d, const Scenario& scenario,
                                      std::uint64_t verification_seed,
                                      std::size_t samples = 10000) {
  if (samples < 1000) throw std::invalid_argument("verification needs at least 1000 samples");
  const CoverageSampler fresh(scenario.region, samples, verification_seed);
  Verification v;
  v.coverage = coverage(d, scenario, fresh);
  const Connectivity conn = connectivity(d, scenario);
  v.connectivity_ratio = conn.ratio;
  v.is_connected = conn.is_connected;
  for (double e : per_node_energy(d, scenario))
    if (e > scenario.e_max) v.per_node_energy_ok = false;
  return v;
}

inline double disk_count(double fraction, const Scenario& scenario) {
  return fraction * scenario.region.area() / (std::numbers::pi * scenario.rs * scenario.rs);
}

// Fewest disks whose total area reaches the target fraction of the region.
inline std::size_t analytic_lower_bound(const Scenario& scenario) {
  const double bound = std::ceil(disk_count(scenario.coverage_target, scenario));
  return std::max<std::size_t>(1, static_cast<std::size_t>(bound));
}

// Search gives up past four times the region area in disk areas.
inline std::size_t node_ceiling(const Scenario& scenario) {
  const double bound = std::ceil(disk_count(4.0, scenario));
  return std::max(analytic_lower_bound(scenario), static_cast<std::size_t>(bound));
}

struct FeasibilityReport {
  std::size_t n = 0;
  bool feasible = false;
  double verified_coverage = 0.0;
  double connectivity_ratio = 0.0;
  bool is_connected = false;
  bool per_node_energy_ok = true;
  Deployment deployment;
  // Search-time metrics of the returned deployment (frozen sampler).
  Evaluation evaluation;
  std::size_t generations_used = 0;
  std::size_t attempts = 0;
  std::uint64_t seed = 0;
  std::uint64_t verification_seed = 0;
  double wall_time = 0.0;
};

inline std::uint64_t retry_seed(std::uint64_t base, std::size_t retry) {
  return base + 1000ULL * retry;
}

inline std::uint64_t verification_seed_for(std::uint64_t run_seed) {
  return derive_seed(run_seed, stream::verify);
}

inline bool is_feasible(const Verification& v, const Scenario& scenario, const SearchConfig& search) {
  return v.is_connected && v.coverage >= scenario.coverage_target - search.mc_tolerance;
}

// Linear scan upward from the analytic lower bound. At each n the engine runs
// up to retries_per_n times with seeds config.seed + 1000 * retry; the first
// run whose fresh-sample verification passes ends the search.
inline FeasibilityReport find_min_nodes(const Scenario& scenario, Engine engine,
                                        const FitnessWeights& weights,
                                        const OptimizerConfig& config,
                                        const SearchConfig& search = {}) {
  config.validate();
  search.validate();
  const auto started = std::chrono::steady_clock::now();
  const std::size_t ceiling = node_ceiling(scenario);
  std::size_t attempts = 0;
  for (std::size_t n = analytic_lower_bound(scenario); n <= ceiling; ++n) {
    for (std::size_t r = 0; r < search.retries_per_n; ++r) {
      OptimizerConfig run = config;
      run.seed = retry_seed(config.seed, r);
      ++attempts;
      const CoverageSampler sampler(scenario.region, run.monte_carlo_samples,
                                    derive_seed(run.seed, stream::sampler));
      const FitnessObjective objective(scenario, sampler, weights);
      const RunState state = run_engine(engine, n, scenario.region, objective, run);
      const std::uint64_t vseed = verification_seed_for(run.seed);
      const Verification v =
          verify_deployment(state.global_best, scenario, vseed, search.verify_samples);
      if (!is_feasible(v, scenario, search)) continue;
      FeasibilityReport report;
      report.n = n;
      report.feasible = true;
      report.verified_coverage = v.coverage;
      report.connectivity_ratio = v.connectivity_ratio;
      report.is_connected = v.is_connected;
      report.per_node_energy_ok = v.per_node_energy_ok;
      report.deployment = state.global_best;
      report.evaluation = objective.evaluate(state.global_best);
      report.generations_used = state.generation;
      report.attempts = attempts;
      report.seed = run.seed;
      report.verification_seed = vseed;
      report.wall_time =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      return report;
    }
  }
  throw SearchExhausted("no feasible deployment found up to the ceiling of " +
                        std::to_string(ceiling) + " nodes after " + std::to_string(attempts) +
                        " attempts");
}

}  // namespace wsnopt
