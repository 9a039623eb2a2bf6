#include <gtest/gtest.h>

#include <cmath>

#include "wsnopt/search.hpp"

namespace wsnopt {
namespace {

Scenario square(double side, double rs, double rc) {
  Scenario s;
  s.region = {side, side};
  s.rs = rs;
  s.rc = rc;
  return s;
}

TEST(LowerBound, DiskAreaCount) {
  EXPECT_EQ(analytic_lower_bound(square(100, 25, 50)), 5u);
  EXPECT_EQ(analytic_lower_bound(square(100, 20, 40)), 8u);
  EXPECT_EQ(analytic_lower_bound(square(100, 10, 20)), 31u);
  Scenario tiny = square(100, 10, 20);
  tiny.coverage_target = 0.001;
  EXPECT_EQ(analytic_lower_bound(tiny), 1u);
}

TEST(NodeCeiling, FourRegionAreasOfDisks) {
  EXPECT_EQ(node_ceiling(square(100, 10, 20)), 128u);
  EXPECT_GE(node_ceiling(square(100, 200, 400)), 1u);
}

TEST(Seeds, RetryAndVerificationDerivation) {
  EXPECT_EQ(retry_seed(7, 0), 7u);
  EXPECT_EQ(retry_seed(7, 2), 2007u);
  EXPECT_EQ(verification_seed_for(7), derive_seed(7, stream::verify));
  EXPECT_NE(verification_seed_for(7), derive_seed(7, stream::sampler));
}

TEST(Verify, SaturatedGridIsFullyCoveredAndConnected) {
  const Scenario s = square(100, 10, 20);
  Deployment d;
  for (double y = 0; y <= 100; y += 5)
    for (double x = 0; x <= 100; x += 5) d.nodes.push_back({x, y});
  const Verification v = verify_deployment(d, s, 3);
  EXPECT_EQ(v.coverage, 1.0);
  EXPECT_TRUE(v.is_connected);
  EXPECT_EQ(v.connectivity_ratio, 1.0);
  EXPECT_TRUE(v.per_node_energy_ok);
}

TEST(Verify, DeterministicForASeed) {
  const Scenario s = square(100, 15, 30);
  const Deployment d = random_deployment(20, s.region, 4);
  const Verification a = verify_deployment(d, s, 99), b = verify_deployment(d, s, 99);
  EXPECT_EQ(a.coverage, b.coverage);
  EXPECT_EQ(a.is_connected, b.is_connected);
  EXPECT_EQ(a.connectivity_ratio, b.connectivity_ratio);
  EXPECT_THROW(verify_deployment(d, s, 99, 999), std::invalid_argument);
}

TEST(Verify, PerNodeEnergyCap) {
  Scenario s = square(100, 10, 20);
  const Deployment d{{{10, 10}, {30, 10}}};
  s.e_max = transmit_energy(20, s);
  EXPECT_TRUE(verify_deployment(d, s, 1).per_node_energy_ok);
  s.e_max = transmit_energy(19, s);
  EXPECT_FALSE(verify_deployment(d, s, 1).per_node_energy_ok);
}

TEST(Verify, SmallSampleEstimateConcentratesNearFreshEstimate) {
  // A square lattice of pitch 16 with rs = 10 covers roughly 95% of the region.
  const Scenario s = square(100, 10, 20);
  Deployment d;
  for (double y = 2; y <= 100; y += 16)
    for (double x = 2; x <= 100; x += 16) d.nodes.push_back({x, y});
  const double truth = verify_deployment(d, s, 1, 200000).coverage;
  ASSERT_NEAR(truth, 0.95, 0.03);
  int within = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const CoverageSampler search(s.region, 500, derive_seed(trial, stream::sampler));
    const double estimate = coverage(d, s, search);
    const double fresh = verify_deployment(d, s, verification_seed_for(trial)).coverage;
    within += std::fabs(estimate - fresh) <= 0.03;
  }
  EXPECT_GE(within, 95);
}

TEST(FindMinNodes, LargeRangesNeedOneNode) {
  const Scenario s = square(100, 150, 300);
  const FeasibilityReport r = find_min_nodes(s, Engine::hybrid, FitnessWeights{}, OptimizerConfig::set1());
  EXPECT_EQ(r.n, 1u);
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.verified_coverage, 1.0);
}

TEST(FindMinNodes, ReportIsSelfConsistent) {
  const Scenario s = square(100, 25, 50);
  OptimizerConfig c = OptimizerConfig::set1();
  c.seed = 3;
  const FeasibilityReport r = find_min_nodes(s, Engine::hybrid, FitnessWeights{}, c);
  EXPECT_GE(r.n, analytic_lower_bound(s));
  EXPECT_LE(r.n, 10u);
  EXPECT_EQ(r.deployment.size(), r.n);
  const Verification v = verify_deployment(r.deployment, s, r.verification_seed);
  EXPECT_EQ(v.coverage, r.verified_coverage);
  EXPECT_EQ(v.is_connected, r.is_connected);
  EXPECT_TRUE(r.is_connected);
  EXPECT_GE(r.verified_coverage, s.coverage_target - 0.02);
  EXPECT_EQ(r.verification_seed, verification_seed_for(r.seed));
  EXPECT_GE(r.attempts, 1u);
}

TEST(FindMinNodes, ExtraNodesAreNoHarder) {
  const Scenario s = square(100, 20, 40);
  OptimizerConfig c = OptimizerConfig::set1();
  const FeasibilityReport r = find_min_nodes(s, Engine::hybrid, FitnessWeights{}, c);
  auto feasible_fraction = [&](std::size_t n) {
    int ok = 0;
    for (std::size_t retry = 0; retry < 3; ++retry) {
      OptimizerConfig run = c;
      run.seed = retry_seed(c.seed, retry);
      const RunState state = optimize(Engine::hybrid, n, s, FitnessWeights{}, run);
      ok += is_feasible(verify_deployment(state.global_best, s, verification_seed_for(run.seed)), s,
                        SearchConfig{});
    }
    return ok;
  };
  EXPECT_GE(feasible_fraction(r.n + 2), feasible_fraction(r.n));
}

TEST(FindMinNodes, StarvedBudgetExhausts) {
  Scenario s = square(100, 10, 20);
  s.coverage_target = 1.0;
  OptimizerConfig c;
  c.population_size = 2;
  c.max_generations = 1;
  SearchConfig search;
  search.retries_per_n = 1;
  search.mc_tolerance = 0.0;
  EXPECT_THROW(find_min_nodes(s, Engine::ga, FitnessWeights{}, c, search), SearchExhausted);
}

TEST(SearchConfig, Validation) {
  SearchConfig c;
  EXPECT_NO_THROW(c.validate());
  c.retries_per_n = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.verify_samples = 10;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace wsnopt
