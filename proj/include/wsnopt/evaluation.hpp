#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "wsnopt/geometry.hpp"

namespace wsnopt {

// Monte Carlo sample set for area coverage. Frozen after construction so that
// fitness stays a deterministic function of the deployment within one run.
class CoverageSampler {
 public:
  CoverageSampler(const Region& region, std::size_t samples, std::uint64_t seed)
      : seed_(seed) {
    if (samples == 0) throw std::invalid_argument("coverage sampler needs at least one sample");
    Rng rng(seed);
    points_.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) points_.push_back(random_point(region, rng));
  }

  // Explicit sample set, e.g. a lattice for exact checks.
  explicit CoverageSampler(std::vector<Point> points, std::uint64_t seed = 0)
      : points_(std::move(points)), seed_(seed) {
    if (points_.empty()) throw std::invalid_argument("coverage sampler needs at least one sample");
  }

  std::span<const Point> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  std::uint64_t seed() const { return seed_; }

 private:
  std::vector<Point> points_;
  std::uint64_t seed_;
};

struct FitnessWeights {
  double coverage = 0.6;
  double connectivity = 0.3;
  double energy = 0.1;

  void validate() const {
    if (!(coverage >= 0.0) || !(connectivity >= 0.0) || !(energy >= 0.0))
      throw std::invalid_argument("fitness weights must be non-negative");
    if (!(coverage + connectivity + energy > 0.0))
      throw std::invalid_argument("fitness weights must not all be zero");
  }

  friend bool operator==(const FitnessWeights&, const FitnessWeights&) = default;
};

struct Evaluation {
  double coverage = 0.0;
  double connectivity_ratio = 0.0;
  bool is_connected = false;
  double energy_total = 0.0;
  double normalized_energy = 0.0;
  double fitness = 0.0;
};

namespace detail {

// Uniform bucket grid over node positions; cell side equals the query radius,
// so a disk query only inspects the 3x3 neighbourhood of its cell.
class NodeGrid {
 public:
  NodeGrid(std::span<const Point> nodes, const Region& region, double radius)
      : nodes_(nodes), cell_(radius) {
    cols_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(region.width / cell_)) + 1);
    rows_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(region.height / cell_)) + 1);
    start_.assign(cols_ * rows_ + 1, 0);
    std::vector<std::size_t> cell_of(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      cell_of[i] = cell_index(nodes[i]);
      ++start_[cell_of[i] + 1];
    }
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    members_.resize(nodes.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < nodes.size(); ++i) members_[fill[cell_of[i]]++] = i;
  }

  bool any_within(const Point& p, double radius_sq) const {
    const auto [cx, cy] = cell_xy(p);
    const std::size_t x0 = cx == 0 ? 0 : cx - 1, x1 = std::min(cols_ - 1, cx + 1);
    const std::size_t y0 = cy == 0 ? 0 : cy - 1, y1 = std::min(rows_ - 1, cy + 1);
    for (std::size_t y = y0; y <= y1; ++y) {
      for (std::size_t x = x0; x <= x1; ++x) {
        const std::size_t c = y * cols_ + x;
        for (std::size_t m = start_[c]; m < start_[c + 1]; ++m)
          if (squared_distance(nodes_[members_[m]], p) <= radius_sq) return true;
      }
    }
    return false;
  }

 private:
  std::pair<std::size_t, std::size_t> cell_xy(const Point& p) const {
    auto clamp_cell = [](double v, std::size_t n) {
      if (!(v > 0.0)) return std::size_t{0};
      return std::min(n - 1, static_cast<std::size_t>(v));
    };
    return {clamp_cell(p.x / cell_, cols_), clamp_cell(p.y / cell_, rows_)};
  }
  std::size_t cell_index(const Point& p) const {
    const auto [x, y] = cell_xy(p);
    return y * cols_ + x;
  }

  std::span<const Point> nodes_;
  double cell_;
  std::size_t cols_ = 1, rows_ = 1;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> members_;
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

  std::size_t largest() {
    std::size_t best = 0;
    for (std::size_t v = 0; v < parent_.size(); ++v)
      if (find(v) == v) best = std::max(best, size_[v]);
    return best;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace detail

// Fraction of sampler points within rs of at least one node (binary disk model).
inline double coverage(const Deployment& d, const Scenario& scenario, const CoverageSampler& sampler) {
  if (d.empty()) return 0.0;
  const double rs_sq = scenario.rs * scenario.rs;
  std::size_t hit = 0;
  if (d.size() <= 16) {
    for (const Point& p : sampler.points()) {
      for (const Point& node : d.nodes) {
        if (squared_distance(node, p) <= rs_sq) {
          ++hit;
          break;
        }
      }
    }
  } else {
    const detail::NodeGrid grid(d.nodes, scenario.region, scenario.rs);
    for (const Point& p : sampler.points())
      if (grid.any_within(p, rs_sq)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(sampler.size());
}

struct Connectivity {
  double ratio = 0.0;
  bool is_connected = false;
};

// Largest-component fraction of the disk graph with edges at distance <= rc.
inline Connectivity connectivity(const Deployment& d, const Scenario& scenario) {
  const std::size_t n = d.size();
  if (n == 0) return {0.0, false};
  if (n == 1) return {1.0, true};
  const double rc_sq = scenario.rc * scenario.rc;
  detail::DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (squared_distance(d.nodes[i], d.nodes[j]) <= rc_sq) sets.unite(i, j);
  const std::size_t largest = sets.largest();
  return {static_cast<double>(largest) / static_cast<double>(n), largest == n};
}

// Energy to send one packet over a link given its squared length.
inline double transmit_energy_squared(double dist_sq, const Scenario& scenario) {
  const double bits = static_cast<double>(scenario.packet_bits);
  return scenario.e_elec * bits + scenario.e_amp * bits * dist_sq;
}

inline double transmit_energy(double dist, const Scenario& scenario) {
  return transmit_energy_squared(dist * dist, scenario);
}

struct TreeEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double length = 0.0;
  double length_sq = 0.0;
};

// Routing backbone: Euclidean MST (Prim, dense O(n^2)) with the node nearest
// the region centre acting as sink.
struct RoutingTree {
  std::vector<TreeEdge> edges;
  std::size_t sink = 0;
};

inline std::size_t sink_index(const Deployment& d, const Region& region) {
  const Point c = region.center();
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.size(); ++i)
    if (squared_distance(d.nodes[i], c) < squared_distance(d.nodes[best], c)) best = i;
  return best;
}

inline RoutingTree routing_tree(const Deployment& d, const Region& region) {
  RoutingTree tree;
  const std::size_t n = d.size();
  if (n == 0) return tree;
  tree.sink = sink_index(d, region);
  if (n == 1) return tree;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(n, inf);
  std::vector<std::size_t> via(n, tree.sink);
  std::vector<char> in_tree(n, 0);
  std::size_t current = tree.sink;
  in_tree[current] = 1;
  tree.edges.reserve(n - 1);
  for (std::size_t added = 1; added < n; ++added) {
    std::size_t next = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const double dsq = squared_distance(d.nodes[current], d.nodes[v]);
      if (dsq < best[v]) {
        best[v] = dsq;
        via[v] = current;
      }
      if (next == n || best[v] < best[next]) next = v;
    }
    in_tree[next] = 1;
    tree.edges.push_back({via[next], next, distance(d.nodes[via[next]], d.nodes[next]), best[next]});
    current = next;
  }
  return tree;
}

// Sum of per-edge transmit energies, added in ascending order so the total is
// a function of the edge multiset alone.
inline double tree_energy(std::span<const TreeEdge> edges, const Scenario& scenario) {
  std::vector<double> costs;
  costs.reserve(edges.size());
  for (const TreeEdge& e : edges) costs.push_back(transmit_energy_squared(e.length_sq, scenario));
  std::sort(costs.begin(), costs.end());
  double total = 0.0;
  for (double c : costs) total += c;
  return total;
}

// One L-bit packet per node forwarded along the MST towards the sink.
inline double total_energy(const Deployment& d, const Scenario& scenario) {
  if (d.size() <= 1) return 0.0;
  return tree_energy(routing_tree(d, scenario.region).edges, scenario);
}

// Largest transmit energy over each node's incident backbone edges.
inline std::vector<double> per_node_energy(const Deployment& d, const Scenario& scenario) {
  std::vector<double> out(d.size(), 0.0);
  for (const TreeEdge& e : routing_tree(d, scenario.region).edges) {
    const double cost = transmit_energy_squared(e.length_sq, scenario);
    out[e.a] = std::max(out[e.a], cost);
    out[e.b] = std::max(out[e.b], cost);
  }
  return out;
}

inline Evaluation evaluate(const Deployment& d, const Scenario& scenario,
                           const CoverageSampler& sampler, const FitnessWeights& weights) {
  weights.validate();
  Evaluation ev;
  if (d.empty()) return ev;
  ev.coverage = coverage(d, scenario, sampler);
  const Connectivity conn = connectivity(d, scenario);
  ev.connectivity_ratio = conn.ratio;
  ev.is_connected = conn.is_connected;
  ev.energy_total = total_energy(d, scenario);
  if (d.size() > 1)
    ev.normalized_energy =
        ev.energy_total / (static_cast<double>(d.size()) * transmit_energy(scenario.rc, scenario));
  ev.fitness = weights.coverage * ev.coverage + weights.connectivity * ev.connectivity_ratio -
               weights.energy * ev.normalized_energy;
  return ev;
}

// Deployment -> scalar fitness under a fixed scenario, sampler and weights.
// This is the objective the optimizers maximize.
class FitnessObjective {
 public:
  FitnessObjective(const Scenario& scenario, const CoverageSampler& sampler,
                   const FitnessWeights& weights)
      : scenario_(&scenario), sampler_(&sampler), weights_(weights) {
    weights_.validate();
  }

  double operator()(const Deployment& d) const { return evaluate(d).fitness; }

  Evaluation evaluate(const Deployment& d) const {
    return wsnopt::evaluate(d, *scenario_, *sampler_, weights_);
  }

  const Scenario& scenario() const { return *scenario_; }
  const CoverageSampler& sampler() const { return *sampler_; }
  const FitnessWeights& weights() const { return weights_; }

 private:
  const Scenario* scenario_;
  const CoverageSampler* sampler_;
  FitnessWeights weights_;
};

}  // namespace wsnopt
