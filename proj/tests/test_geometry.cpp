#include <gtest/gtest.h>

#include <cmath>

#include "wsnopt/geometry.hpp"

namespace wsnopt {
namespace {

TEST(Distance, KnownValues) {
  EXPECT_DOUBLE_EQ(distance({0, 0}, {3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(distance({7, 7}, {7, 7}), 0.0);
  EXPECT_DOUBLE_EQ(distance({0, 0}, {10, 0}), 10.0);
}

TEST(Distance, SymmetryAndTriangleInequality) {
  Rng rng(7);
  const Region r{100, 100};
  for (int i = 0; i < 1000; ++i) {
    const Point a = random_point(r, rng), b = random_point(r, rng), c = random_point(r, rng);
    EXPECT_EQ(distance(a, b), distance(b, a));
    EXPECT_LE(distance(a, c), distance(a, b) + distance(b, c) + 1e-12);
    EXPECT_EQ(distance(a, b) == 0.0, a == b);
  }
}

TEST(ClampToRegion, Examples) {
  const Region r{100, 100};
  EXPECT_EQ(clamp_to_region({-5, 50}, r), (Point{0, 50}));
  EXPECT_EQ(clamp_to_region({50, 50}, r), (Point{50, 50}));
  EXPECT_EQ(clamp_to_region({120, 130}, r), (Point{100, 100}));
}

TEST(ClampToRegion, Idempotent) {
  Rng rng(3);
  const Region r{80, 40};
  for (int i = 0; i < 500; ++i) {
    const Point p{rng.uniform(-100, 200), rng.uniform(-100, 200)};
    const Point once = clamp_to_region(p, r);
    EXPECT_TRUE(r.contains(once));
    EXPECT_EQ(clamp_to_region(once, r), once);
  }
}

TEST(RandomDeployment, EmptyAndDeterministic) {
  const Region r{100, 100};
  EXPECT_TRUE(random_deployment(0, r, 42).empty());
  const Deployment a = random_deployment(100, r, 42);
  const Deployment b = random_deployment(100, r, 42);
  ASSERT_EQ(a.size(), 100u);
  EXPECT_EQ(a, b);
  for (const Point& p : a.nodes) EXPECT_TRUE(r.contains(p));
  EXPECT_NE(a, random_deployment(100, r, 43));
}

TEST(RandomDeployment, MeanMatchesUniformMoments) {
  // Mean of 10000 U(0, 100) draws: 50 +- 3 * (100 / sqrt(12)) / sqrt(10000).
  const Deployment d = random_deployment(10000, Region{100, 100}, 2024);
  double sx = 0, sy = 0;
  for (const Point& p : d.nodes) {
    sx += p.x;
    sy += p.y;
  }
  const double band = 3.0 * (100.0 / std::sqrt(12.0)) / std::sqrt(10000.0);
  EXPECT_NEAR(sx / 10000.0, 50.0, band);
  EXPECT_NEAR(sy / 10000.0, 50.0, band);
}

TEST(Scenario, RejectsShortCommunicationRangeUnlessOverridden) {
  Scenario s;
  s.region = {100, 100};
  s.rs = 20;
  s.rc = 30;
  EXPECT_THROW(s.validate(), ScenarioError);
  EXPECT_NO_THROW(s.validate(true));
  s.rc = 40;
  EXPECT_NO_THROW(s.validate());
}

TEST(Scenario, RejectsDegenerateValues) {
  Scenario s;
  s.region = {100, 100};
  s.rs = 10;
  s.rc = 20;
  Scenario bad = s;
  bad.region.width = 0;
  EXPECT_THROW(bad.validate(), ScenarioError);
  bad = s;
  bad.coverage_target = 0.0;
  EXPECT_THROW(bad.validate(), ScenarioError);
  bad = s;
  bad.coverage_target = 1.01;
  EXPECT_THROW(bad.validate(), ScenarioError);
  bad = s;
  bad.rs = -1;
  EXPECT_THROW(bad.validate(true), ScenarioError);
}

TEST(Rng, UniformInUnitIntervalAndIndexInRange) {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(rng.index(7), 7u);
  }
}

TEST(DeriveSeed, StreamsDiffer) {
  EXPECT_NE(derive_seed(1, stream::ga), derive_seed(1, stream::pso));
  EXPECT_NE(derive_seed(1, stream::ga), derive_seed(2, stream::ga));
  EXPECT_EQ(derive_seed(5, stream::init), derive_seed(5, stream::init));
}

}  // namespace
}  // namespace wsnopt
