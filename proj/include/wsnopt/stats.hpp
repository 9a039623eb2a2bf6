#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wsnopt/error.hpp"
#include "wsnopt/records.hpp"

namespace wsnopt {

// Paired differences a - b with exact zeros dropped.
struct PairedSample {
  std::string label_a;
  std::string label_b;
  std::vector<double> differences;

  static PairedSample from_pairs(std::string label_a, std::string label_b,
                                 std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw TestError("paired samples differ in length");
    PairedSample s{std::move(label_a), std::move(label_b), {}};
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      if (d != 0.0) s.differences.push_back(d);
    }
    return s;
  }
};

enum class Alternative { two_sided, less, greater };

inline std::string_view to_string(Alternative a) {
  switch (a) {
    case Alternative::two_sided: return "two-sided";
    case Alternative::less: return "less";
    case Alternative::greater: return "greater";
  }
  return "?";
}

inline std::optional<Alternative> parse_alternative(std::string_view s) {
  if (s == "two-sided") return Alternative::two_sided;
  if (s == "less") return Alternative::less;
  if (s == "greater") return Alternative::greater;
  return std::nullopt;
}

enum class WilcoxonMethod { exact, normal_approximation };

inline std::string_view to_string(WilcoxonMethod m) {
  return m == WilcoxonMethod::exact ? "exact" : "normal-approximation";
}

struct WilcoxonResult {
  // min(W+, W-) for two-sided tests, W+ otherwise.
  double w_statistic = 0.0;
  double w_plus = 0.0;
  double w_minus = 0.0;
  std::size_t n_effective = 0;
  double p_value = 1.0;
  WilcoxonMethod method = WilcoxonMethod::exact;
  Alternative alternative = Alternative::two_sided;
};

inline constexpr std::size_t kExactWilcoxonLimit = 25;

namespace detail {

// Twice the average rank of each |d| (ties share the mean of their positions),
// kept integral so exact tail sums compare without rounding.
inline std::vector<std::uint64_t> doubled_ranks(std::span<const double> diffs) {
  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::fabs(diffs[i]) < std::fabs(diffs[j]);
  });
  std::vector<std::uint64_t> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::fabs(diffs[order[j + 1]]) == std::fabs(diffs[order[i]])) ++j;
    const std::uint64_t twice_avg = (i + 1) + (j + 1);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = twice_avg;
    i = j + 1;
  }
  return ranks;
}

inline double tie_correction(std::span<const double> diffs) {
  std::vector<double> mags;
  mags.reserve(diffs.size());
  for (double d : diffs) mags.push_back(std::fabs(d));
  std::sort(mags.begin(), mags.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < mags.size();) {
    std::size_t j = i;
    while (j < mags.size() && mags[j] == mags[i]) ++j;
    const double t = static_cast<double>(j - i);
    sum += t * t * t - t;
    i = j;
  }
  return sum;
}

inline double upper_normal_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace detail

// Wilcoxon signed-rank test on the sample's differences. Exact null
// distribution over all 2^n sign assignments (counted by dynamic programming
// over doubled rank sums) for n <= 25; normal approximation with continuity
// and tie correction above that.
inline WilcoxonResult wilcoxon_signed_rank(const PairedSample& sample,
                                           Alternative alternative = Alternative::two_sided) {
  const std::span<const double> diffs = sample.differences;
  const std::size_t n = diffs.size();
  if (n == 0) throw TestError("signed-rank test undefined: every paired difference is zero");

  const std::vector<std::uint64_t> ranks = detail::doubled_ranks(diffs);
  std::uint64_t plus2 = 0, total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += ranks[i];
    if (diffs[i] > 0.0) plus2 += ranks[i];
  }

  WilcoxonResult r;
  r.n_effective = n;
  r.alternative = alternative;
  r.w_plus = 0.5 * static_cast<double>(plus2);
  r.w_minus = 0.5 * static_cast<double>(total2 - plus2);
  r.w_statistic =
      alternative == Alternative::two_sided ? std::min(r.w_plus, r.w_minus) : r.w_plus;

  double p_greater = 0.0, p_less = 0.0;
  if (n <= kExactWilcoxonLimit) {
    r.method = WilcoxonMethod::exact;
    std::vector<std::uint64_t> count(total2 + 1, 0);
    count[0] = 1;
    std::uint64_t reach = 0;
    for (std::uint64_t rank : ranks) {
      for (std::uint64_t s = reach + 1; s-- > 0;)
        if (count[s]) count[s + rank] += count[s];
      reach += rank;
    }
    std::uint64_t ge = 0, le = 0;
    for (std::uint64_t s = 0; s <= total2; ++s) {
      if (s >= plus2) ge += count[s];
      if (s <= plus2) le += count[s];
    }
    const double patterns = std::ldexp(1.0, static_cast<int>(n));
    p_greater = static_cast<double>(ge) / patterns;
    p_less = static_cast<double>(le) / patterns;
  } else {
    r.method = WilcoxonMethod::normal_approximation;
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var =
        nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - detail::tie_correction(diffs) / 48.0;
    const double sd = std::sqrt(var);
    p_greater = detail::upper_normal_tail((r.w_plus - mean - 0.5) / sd);
    p_less = detail::upper_normal_tail(-(r.w_plus - mean + 0.5) / sd);
  }

  switch (alternative) {
    case Alternative::greater: r.p_value = p_greater; break;
    case Alternative::less: r.p_value = p_less; break;
    case Alternative::two_sided: r.p_value = std::min(1.0, 2.0 * std::min(p_greater, p_less)); break;
  }
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  return r;
}

// ---------------------------------------------------------------------------
// Run summaries

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single value
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

inline MetricSummary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("cannot summarize an empty set");
  MetricSummary s;
  s.count = values.size();
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  return s;
}

enum class GroupKey { scenario, algorithm, seed };

struct GroupSummary {
  std::vector<std::string> key;
  std::size_t count = 0;
  MetricSummary coverage;
  MetricSummary connectivity_ratio;
  MetricSummary n_nodes;
  MetricSummary wall_time;
  MetricSummary energy_total;
};

inline std::string group_value(const RunRecord& r, GroupKey k) {
  switch (k) {
    case GroupKey::scenario: return r.scenario;
    case GroupKey::algorithm: return r.algorithm;
    case GroupKey::seed: return std::to_string(r.seed);
  }
  return {};
}

// Groups are returned in first-appearance order of their keys.
inline std::vector<GroupSummary> summarize_runs(std::span<const RunRecord> records,
                                                std::span<const GroupKey> group_by) {
  if (records.empty()) throw std::invalid_argument("no run records to summarize");
  std::vector<std::vector<std::string>> keys;
  std::map<std::vector<std::string>, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : records) {
    std::vector<std::string> key;
    for (GroupKey k : group_by) key.push_back(group_value(r, k));
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(&r);
  }
  std::vector<GroupSummary> out;
  for (const auto& key : keys) {
    const auto& members = groups.at(key);
    auto column = [&](auto field) {
      std::vector<double> v;
      for (const RunRecord* r : members) v.push_back(static_cast<double>(field(*r)));
      return summarize(v);
    };
    GroupSummary g;
    g.key = key;
    g.count = members.size();
    g.coverage = column([](const RunRecord& r) { return r.coverage; });
    g.connectivity_ratio = column([](const RunRecord& r) { return r.connectivity_ratio; });
    g.n_nodes = column([](const RunRecord& r) { return r.n_nodes; });
    g.wall_time = column([](const RunRecord& r) { return r.wall_time; });
    g.energy_total = column([](const RunRecord& r) { return r.energy_total; });
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace wsnopt
