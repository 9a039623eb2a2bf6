#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsnopt/error.hpp"

namespace wsnopt {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double squared_distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Axis-aligned rectangle anchored at the origin: [0, width] x [0, height].
struct Region {
  double width = 0.0;
  double height = 0.0;

  double area() const { return width * height; }
  double min_side() const { return std::min(width, height); }
  double diagonal() const { return std::hypot(width, height); }
  Point center() const { return {0.5 * width, 0.5 * height}; }

  bool contains(const Point& p) const {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
  }

  friend bool operator==(const Region&, const Region&) = default;
};

inline Point clamp_to_region(const Point& p, const Region& region) {
  return {std::clamp(p.x, 0.0, region.width), std::clamp(p.y, 0.0, region.height)};
}

// Defaults are the first-order radio model constants (50 nJ/bit electronics,
// 100 pJ/bit/m^2 amplifier, 4000-bit packets) and a 95% coverage target.
struct Scenario {
  Region region;
  double rs = 0.0;
  double rc = 0.0;
  double e_elec = 50e-9;
  double e_amp = 100e-12;
  int packet_bits = 4000;
  double coverage_target = 0.95;
  double e_max = std::numeric_limits<double>::infinity();

  // Throws ScenarioError. rc >= 2 rs is required unless explicitly overridden.
  void validate(bool allow_short_rc = false) const {
    auto fail = [](const std::string& msg) { throw ScenarioError(msg); };
    if (!(region.width > 0.0) || !(region.height > 0.0) || !std::isfinite(region.area()))
      fail("region dimensions must be positive and finite");
    if (!(rs > 0.0) || !std::isfinite(rs)) fail("sensing radius must be positive");
    if (!(rc > 0.0) || !std::isfinite(rc)) fail("communication radius must be positive");
    if (!allow_short_rc && rc < 2.0 * rs)
      fail("communication radius " + std::to_string(rc) +
           " is below twice the sensing radius " + std::to_string(rs));
    if (!(coverage_target > 0.0) || coverage_target > 1.0)
      fail("coverage target must lie in (0, 1]");
    if (!(e_elec >= 0.0) || !(e_amp >= 0.0)) fail("energy constants must be non-negative");
    if (packet_bits <= 0) fail("packet size must be positive");
    if (!(e_max > 0.0)) fail("per-node energy cap must be positive");
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Node index is node identity for the lifetime of one optimizer run.
struct Deployment {
  std::vector<Point> nodes;

  std::size_t size() const { return nodes.size(); }
  bool empty() const { return nodes.empty(); }

  friend bool operator==(const Deployment&, const Deployment&) = default;
};

// splitmix64 finalizer; used to fan one user seed out into independent streams.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(mix_seed(seed) ^ mix_seed(stream * 0x632be59bd9b4e019ULL + 1));
}

// Random streams used by one run. Keeping them apart lets a disabled
// operator leave every other stream untouched.
namespace stream {
inline constexpr std::uint64_t init = 1;
inline constexpr std::uint64_t ga = 2;
inline constexpr std::uint64_t pso = 3;
inline constexpr std::uint64_t sampler = 4;
inline constexpr std::uint64_t verify = 5;
}  // namespace stream

// mt19937_64 with hand-rolled conversions so sequences do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on {0, ..., n-1}; n > 0.
  std::size_t index(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % bound);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

inline Point random_point(const Region& region, Rng& rng) {
  const double x = rng.uniform(0.0, region.width);
  const double y = rng.uniform(0.0, region.height);
  return {x, y};
}

inline Deployment random_deployment(std::size_t n, const Region& region, Rng& rng) {
  Deployment d;
  d.nodes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) d.nodes.push_back(random_point(region, rng));
  return d;
}

inline Deployment random_deployment(std::size_t n, const Region& region, std::uint64_t seed) {
  Rng rng(seed);
  return random_deployment(n, region, rng);
}

}  // namespace wsnopt
