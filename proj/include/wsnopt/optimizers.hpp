#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wsnopt/evaluation.hpp"
#include "wsnopt/geometry.hpp"

namespace wsnopt {

template <class F>
concept DeploymentObjective = requires(const F& f, const Deployment& d) {
  { f(d) } -> std::convertible_to<double>;
};

enum class HybridSchedule {
  interleaved,  // GA pass then PSO step inside every generation
  sequential,   // GA passes for the first ga_fraction of generations, PSO afterwards
};

struct OptimizerConfig {
  std::size_t population_size = 50;
  std::size_t max_generations = 50;
  double crossover_rate = 0.8;
  double mutation_rate = 0.1;
  // Mutation displacement half-width as a fraction of each region side.
  double mutation_scale = 0.1;
  double cognitive_weight = 1.5;
  double social_weight = 1.5;
  double inertia_start = 0.9;
  double inertia_end = 0.4;
  // Per-component velocity bound as a fraction of min(M, N).
  double velocity_cap_fraction = 0.2;
  double convergence_epsilon = 1e-4;
  std::size_t convergence_patience = 15;
  std::size_t monte_carlo_samples = 500;
  HybridSchedule hybrid_schedule = HybridSchedule::interleaved;
  double ga_fraction = 0.5;
  std::uint64_t seed = 1;

  // Parameter set 1: Np = 50, 50 generations, c1 = c2 = 1.5.
  static OptimizerConfig set1() { return {}; }

  // Parameter set 2: Np = 100, 100 generations, c1 = c2 = 2.0.
  static OptimizerConfig set2() {
    OptimizerConfig c;
    c.population_size = 100;
    c.max_generations = 100;
    c.cognitive_weight = 2.0;
    c.social_weight = 2.0;
    return c;
  }

  void validate() const {
    auto fail = [](const char* msg) { throw std::invalid_argument(msg); };
    if (population_size < 2) fail("population size must be at least 2");
    if (max_generations < 1) fail("max generations must be at least 1");
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(crossover_rate) || !prob(mutation_rate)) fail("rates must lie in [0, 1]");
    if (!(mutation_scale >= 0.0)) fail("mutation scale must be non-negative");
    if (!(cognitive_weight >= 0.0) || !(social_weight >= 0.0))
      fail("cognitive and social weights must be non-negative");
    if (!(inertia_end >= 0.0) || !(inertia_start >= inertia_end))
      fail("inertia schedule needs inertia_start >= inertia_end >= 0");
    if (!(velocity_cap_fraction > 0.0)) fail("velocity cap fraction must be positive");
    if (!(convergence_epsilon >= 0.0)) fail("convergence epsilon must be non-negative");
    if (convergence_patience < 1) fail("convergence patience must be at least 1");
    if (monte_carlo_samples < 1) fail("monte carlo samples must be at least 1");
    if (!prob(ga_fraction)) fail("ga fraction must lie in [0, 1]");
  }

  // Inertia for generation t in [0, max_generations): linear start -> end.
  double inertia(std::size_t t) const {
    if (max_generations <= 1) return inertia_start;
    const double frac = static_cast<double>(std::min(t, max_generations - 1)) /
                        static_cast<double>(max_generations - 1);
    return inertia_start + (inertia_end - inertia_start) * frac;
  }

  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

// Velocities reuse Point as a 2-D vector (meters per iteration).
using Velocity = std::vector<Point>;

struct Particle {
  Deployment position;
  Velocity velocity;
  double fitness = 0.0;
  Deployment personal_best;
  double personal_best_fitness = 0.0;
};

struct RunState {
  std::vector<Particle> population;
  Deployment global_best;
  double global_best_fitness = -std::numeric_limits<double>::infinity();
  std::size_t generation = 0;
  // Best-so-far fitness; entry 0 is the initial population.
  std::vector<double> fitness_history;
  std::size_t evaluations = 0;
};

enum class Engine { ga, pso, hybrid, random };

inline std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::ga: return "ga";
    case Engine::pso: return "pso";
    case Engine::hybrid: return "hybrid";
    case Engine::random: return "random";
  }
  return "?";
}

inline std::optional<Engine> parse_engine(std::string_view name) {
  if (name == "ga") return Engine::ga;
  if (name == "pso") return Engine::pso;
  if (name == "hybrid" || name == "ga-pso") return Engine::hybrid;
  if (name == "random") return Engine::random;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// GA operators

// Size-2 tournament; ties go to the first contestant drawn.
inline std::size_t tournament_index(std::span<const double> fitness, Rng& rng) {
  const std::size_t a = rng.index(fitness.size());
  const std::size_t b = rng.index(fitness.size());
  return fitness[b] > fitness[a] ? b : a;
}

inline std::pair<std::size_t, std::size_t> ga_select(std::span<const double> fitness, Rng& rng) {
  if (fitness.size() < 2) throw std::invalid_argument("selection needs at least two candidates");
  const std::size_t a = tournament_index(fitness, rng);
  const std::size_t b = tournament_index(fitness, rng);
  return {a, b};
}

// Node-granular uniform crossover: each node copied whole from a or b.
inline Deployment uniform_crossover(const Deployment& a, const Deployment& b, Rng& rng) {
  if (a.size() != b.size()) throw std::invalid_argument("crossover parents differ in node count");
  Deployment child = a;
  for (std::size_t k = 0; k < child.size(); ++k)
    if (rng.bernoulli(0.5)) child.nodes[k] = b.nodes[k];
  return child;
}

inline Deployment ga_crossover(const Deployment& a, const Deployment& b, double crossover_rate,
                               Rng& rng) {
  if (a.size() != b.size()) throw std::invalid_argument("crossover parents differ in node count");
  if (rng.bernoulli(crossover_rate)) return uniform_crossover(a, b, rng);
  return a;
}

// Each node moves with probability mutation_rate by a uniform offset in
// [-scale*M, scale*M] x [-scale*N, scale*N], then is clamped.
inline Deployment ga_mutate(Deployment d, double mutation_rate, const Region& region, Rng& rng,
                            double scale = 0.1) {
  const double hx = scale * region.width;
  const double hy = scale * region.height;
  for (Point& p : d.nodes) {
    if (!rng.bernoulli(mutation_rate)) continue;
    const double dx = rng.uniform(-hx, hx);
    const double dy = rng.uniform(-hy, hy);
    p = clamp_to_region({p.x + dx, p.y + dy}, region);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Run bookkeeping

namespace detail {

template <DeploymentObjective Objective>
double score(const Objective& objective, const Deployment& d, RunState& state) {
  ++state.evaluations;
  return static_cast<double>(objective(d));
}

inline void offer_global(RunState& state, const Deployment& d, double fitness) {
  if (fitness > state.global_best_fitness) {
    state.global_best_fitness = fitness;
    state.global_best = d;
  }
}

inline void refresh_bests(RunState& state, Particle& p) {
  if (p.fitness > p.personal_best_fitness) {
    p.personal_best = p.position;
    p.personal_best_fitness = p.fitness;
  }
  offer_global(state, p.position, p.fitness);
}

inline std::size_t best_current(const RunState& state) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < state.population.size(); ++i)
    if (state.population[i].fitness > state.population[best].fitness) best = i;
  return best;
}

inline std::vector<double> current_fitness(const RunState& state) {
  std::vector<double> f;
  f.reserve(state.population.size());
  for (const Particle& p : state.population) f.push_back(p.fitness);
  return f;
}

class ConvergenceMonitor {
 public:
  explicit ConvergenceMonitor(const OptimizerConfig& config)
      : epsilon_(config.convergence_epsilon), patience_(config.convergence_patience) {}

  // Returns true once improvement stayed below epsilon for `patience` generations.
  bool stalled(double previous_best, double current_best) {
    if (current_best - previous_best < epsilon_)
      ++stall_;
    else
      stall_ = 0;
    return stall_ >= patience_;
  }

 private:
  double epsilon_;
  std::size_t patience_;
  std::size_t stall_ = 0;
};

}  // namespace detail

// Np random deployments from the run's init stream. Every engine starts from
// the same population for a given seed.
template <DeploymentObjective Objective>
RunState initialize_population(std::size_t n, const Region& region, const Objective& objective,
                               const OptimizerConfig& config) {
  RunState state;
  Rng rng(derive_seed(config.seed, stream::init));
  state.population.reserve(config.population_size);
  for (std::size_t i = 0; i < config.population_size; ++i) {
    Particle p;
    p.position = random_deployment(n, region, rng);
    p.velocity.assign(n, Point{});
    p.fitness = detail::score(objective, p.position, state);
    p.personal_best = p.position;
    p.personal_best_fitness = p.fitness;
    state.population.push_back(std::move(p));
  }
  for (const Particle& p : state.population) detail::offer_global(state, p.position, p.fitness);
  state.fitness_history.push_back(state.global_best_fitness);
  return state;
}

// One velocity/position update for every particle at generation `t`, followed
// by re-evaluation and best tracking. r1, r2 are drawn per coordinate.
template <DeploymentObjective Objective>
void pso_step(RunState& state, const Region& region, const Objective& objective,
              const OptimizerConfig& config, std::size_t t, Rng& rng) {
  const double w = config.inertia(t);
  const double cap = config.velocity_cap_fraction * region.min_side();
  const double c1 = config.cognitive_weight;
  const double c2 = config.social_weight;
  const Deployment global = state.global_best;

  auto update = [&](double& x, double& v, double pbest, double gbest, double hi) {
    const double r1 = rng.uniform();
    const double r2 = rng.uniform();
    v = w * v + c1 * r1 * (pbest - x) + c2 * r2 * (gbest - x);
    v = std::clamp(v, -cap, cap);
    x += v;
    if (x < 0.0) {
      x = 0.0;
      v = 0.0;
    } else if (x > hi) {
      x = hi;
      v = 0.0;
    }
  };

  for (Particle& p : state.population) {
    for (std::size_t k = 0; k < p.position.size(); ++k) {
      Point& x = p.position.nodes[k];
      Point& v = p.velocity[k];
      const Point& pb = p.personal_best.nodes[k];
      const Point& gb = global.nodes[k];
      update(x.x, v.x, pb.x, gb.x, region.width);
      update(x.y, v.y, pb.y, gb.y, region.height);
    }
  }
  for (Particle& p : state.population) {
    p.fitness = detail::score(objective, p.position, state);
    detail::refresh_bests(state, p);
  }
}

// Generational GA step: one elite copied verbatim, Np - 1 children from
// tournament selection, crossover and mutation.
template <DeploymentObjective Objective>
void ga_generation(RunState& state, const Region& region, const Objective& objective,
                   const OptimizerConfig& config, Rng& rng) {
  const std::vector<double> fitness = detail::current_fitness(state);
  const std::size_t elite = detail::best_current(state);
  std::vector<Particle> next;
  next.reserve(state.population.size());
  next.push_back(state.population[elite]);
  while (next.size() < state.population.size()) {
    const auto [a, b] = ga_select(fitness, rng);
    Deployment child = ga_crossover(state.population[a].position, state.population[b].position,
                                    config.crossover_rate, rng);
    child = ga_mutate(std::move(child), config.mutation_rate, region, rng, config.mutation_scale);
    Particle p;
    p.velocity.assign(child.size(), Point{});
    p.fitness = detail::score(objective, child, state);
    p.personal_best = child;
    p.personal_best_fitness = p.fitness;
    p.position = std::move(child);
    next.push_back(std::move(p));
  }
  state.population = std::move(next);
  for (const Particle& p : state.population) detail::offer_global(state, p.position, p.fitness);
}

// GA pass over a swarm. Particle i keeps its slot: with probability
// crossover_rate an offspring is bred from two tournament winners, otherwise
// the particle's own position is the starting point; mutation then applies.
// The offspring replaces the particle only if it is not worse. The best
// current particle is left untouched. A replaced particle gets zero velocity
// and keeps the better of its old personal best and the new position.
template <DeploymentObjective Objective>
void hybrid_ga_pass(RunState& state, const Region& region, const Objective& objective,
                    const OptimizerConfig& config, Rng& rng) {
  const std::vector<double> fitness = detail::current_fitness(state);
  const std::size_t elite = detail::best_current(state);
  std::vector<Deployment> parents;
  parents.reserve(state.population.size());
  for (const Particle& p : state.population) parents.push_back(p.position);

  for (std::size_t i = 0; i < state.population.size(); ++i) {
    if (i == elite) continue;
    Particle& p = state.population[i];
    Deployment child = p.position;
    if (rng.bernoulli(config.crossover_rate)) {
      const auto [a, b] = ga_select(fitness, rng);
      child = uniform_crossover(parents[a], parents[b], rng);
    }
    child = ga_mutate(std::move(child), config.mutation_rate, region, rng, config.mutation_scale);
    if (child == p.position) continue;
    const double child_fitness = detail::score(objective, child, state);
    if (child_fitness < p.fitness) continue;
    p.position = std::move(child);
    p.fitness = child_fitness;
    std::fill(p.velocity.begin(), p.velocity.end(), Point{});
    detail::refresh_bests(state, p);
  }
}

template <DeploymentObjective Objective>
RunState run_ga(std::size_t n, const Region& region, const Objective& objective,
                const OptimizerConfig& config) {
  config.validate();
  RunState state = initialize_population(n, region, objective, config);
  Rng rng(derive_seed(config.seed, stream::ga));
  detail::ConvergenceMonitor monitor(config);
  for (std::size_t t = 0; t < config.max_generations; ++t) {
    const double before = state.global_best_fitness;
    ga_generation(state, region, objective, config, rng);
    state.generation = t + 1;
    state.fitness_history.push_back(state.global_best_fitness);
    if (monitor.stalled(before, state.global_best_fitness)) break;
  }
  return state;
}

template <DeploymentObjective Objective>
RunState run_pso(std::size_t n, const Region& region, const Objective& objective,
                 const OptimizerConfig& config) {
  config.validate();
  RunState state = initialize_population(n, region, objective, config);
  Rng rng(derive_seed(config.seed, stream::pso));
  detail::ConvergenceMonitor monitor(config);
  for (std::size_t t = 0; t < config.max_generations; ++t) {
    const double before = state.global_best_fitness;
    pso_step(state, region, objective, config, t, rng);
    state.generation = t + 1;
    state.fitness_history.push_back(state.global_best_fitness);
    if (monitor.stalled(before, state.global_best_fitness)) break;
  }
  return state;
}

// Each generation: GA pass, re-evaluation of changed particles, one PSO step.
// With HybridSchedule::sequential the first ga_fraction of generations run
// only the GA pass and the rest only PSO steps.
template <DeploymentObjective Objective>
RunState run_hybrid(std::size_t n, const Region& region, const Objective& objective,
                    const OptimizerConfig& config) {
  config.validate();
  RunState state = initialize_population(n, region, objective, config);
  Rng ga_rng(derive_seed(config.seed, stream::ga));
  Rng pso_rng(derive_seed(config.seed, stream::pso));
  detail::ConvergenceMonitor monitor(config);
  const auto ga_generations = static_cast<std::size_t>(
      std::llround(config.ga_fraction * static_cast<double>(config.max_generations)));
  for (std::size_t t = 0; t < config.max_generations; ++t) {
    const double before = state.global_best_fitness;
    if (config.hybrid_schedule == HybridSchedule::interleaved) {
      hybrid_ga_pass(state, region, objective, config, ga_rng);
      pso_step(state, region, objective, config, t, pso_rng);
    } else if (t < ga_generations) {
      hybrid_ga_pass(state, region, objective, config, ga_rng);
    } else {
      pso_step(state, region, objective, config, t, pso_rng);
    }
    state.generation = t + 1;
    state.fitness_history.push_back(state.global_best_fitness);
    if (monitor.stalled(before, state.global_best_fitness)) break;
  }
  return state;
}

// Best of `batches` x Np uniform random deployments; batch 0 is the shared
// initial population. No early stopping.
template <DeploymentObjective Objective>
RunState run_random_baseline(std::size_t n, const Region& region, const Objective& objective,
                             const OptimizerConfig& config) {
  config.validate();
  RunState state = initialize_population(n, region, objective, config);
  Rng rng(derive_seed(config.seed, stream::ga));
  for (std::size_t t = 1; t < config.max_generations; ++t) {
    for (Particle& p : state.population) {
      p.position = random_deployment(n, region, rng);
      p.fitness = detail::score(objective, p.position, state);
      p.personal_best = p.position;
      p.personal_best_fitness = p.fitness;
      detail::offer_global(state, p.position, p.fitness);
    }
    state.generation = t;
    state.fitness_history.push_back(state.global_best_fitness);
  }
  return state;
}

// Plain best-of-`budget` random search, the degenerate form of the baseline.
template <DeploymentObjective Objective>
RunState random_search(std::size_t n, const Region& region, const Objective& objective,
                       std::size_t budget, std::uint64_t seed) {
  RunState state;
  Rng rng(derive_seed(seed, stream::init));
  for (std::size_t i = 0; i < budget; ++i) {
    Deployment d = random_deployment(n, region, rng);
    const double f = detail::score(objective, d, state);
    detail::offer_global(state, d, f);
    state.fitness_history.push_back(state.global_best_fitness);
  }
  state.generation = budget;
  return state;
}

template <DeploymentObjective Objective>
RunState run_engine(Engine engine, std::size_t n, const Region& region, const Objective& objective,
                    const OptimizerConfig& config) {
  if (n < 1) throw std::invalid_argument("engines need at least one node");
  switch (engine) {
    case Engine::ga: return run_ga(n, region, objective, config);
    case Engine::pso: return run_pso(n, region, objective, config);
    case Engine::hybrid: return run_hybrid(n, region, objective, config);
    case Engine::random: return run_random_baseline(n, region, objective, config);
  }
  throw std::invalid_argument("unknown engine");
}

// Scenario-level entry point: builds the frozen K-sample coverage sampler from
// the run seed and optimizes the weighted fitness.
inline RunState optimize(Engine engine, std::size_t n, const Scenario& scenario,
                         const FitnessWeights& weights, const OptimizerConfig& config) {
  const CoverageSampler sampler(scenario.region, config.monte_carlo_samples,
                                derive_seed(config.seed, stream::sampler));
  const FitnessObjective objective(scenario, sampler, weights);
  return run_engine(engine, n, scenario.region, objective, config);
}

}  // namespace wsnopt
