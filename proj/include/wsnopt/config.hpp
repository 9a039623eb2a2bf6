#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsnopt/error.hpp"
#include "wsnopt/evaluation.hpp"
#include "wsnopt/geometry.hpp"
#include "wsnopt/optimizers.hpp"
#include "wsnopt/search.hpp"

namespace wsnopt {

struct ScenarioEntry {
  std::string id;
  Region area;
  double rs = 0.0;
  double rc = 0.0;
  double coverage_target = 0.95;

  friend bool operator==(const ScenarioEntry&, const ScenarioEntry&) = default;
};

struct EnergyConfig {
  double e_elec = 50e-9;
  double e_amp = 100e-12;
  int packet_bits = 4000;
  double e_max = std::numeric_limits<double>::infinity();

  friend bool operator==(const EnergyConfig&, const EnergyConfig&) = default;
};

// Everything a batch of experiments needs. Omitted fields take the defaults
// below: parameter set 1 for the optimizer and the first-order radio model
// constants for energy.
struct ExperimentConfig {
  std::vector<ScenarioEntry> scenarios;
  OptimizerConfig optimizer;
  FitnessWeights weights;
  EnergyConfig energy;
  SearchConfig search;
  std::vector<std::uint64_t> seeds{1};
  bool override_rc_check = false;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string default_scenario_id(const Region& area, double rs, double rc) {
  return format_number(area.width) + "x" + format_number(area.height) + "-rs" +
         format_number(rs) + "-rc" + format_number(rc);
}

// Throws ScenarioError on invalid geometry or radii.
inline Scenario make_scenario(const ScenarioEntry& entry, const EnergyConfig& energy,
                              bool override_rc_check) {
  Scenario s;
  s.region = entry.area;
  s.rs = entry.rs;
  s.rc = entry.rc;
  s.coverage_target = entry.coverage_target;
  s.e_elec = energy.e_elec;
  s.e_amp = energy.e_amp;
  s.packet_bits = energy.packet_bits;
  s.e_max = energy.e_max;
  s.validate(override_rc_check);
  return s;
}

namespace detail {

using nlohmann::json;

// Typed accessors that report the dotted field path on failure.
class FieldReader {
 public:
  FieldReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& field, const std::string& msg) {
    throw ConfigError("field '" + field + "': " + msg);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }

  const json& raw(const std::string& key) const {
    seen_.insert(key);
    return obj_.at(key);
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number()) fail(field(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(field(key), "expected a finite number");
    return d;
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number_unsigned()) fail(field(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) fail(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_string()) fail(field(key), "expected a string");
    return v.get<std::string>();
  }

  // Unknown keys are rejected so that typos do not silently fall back to defaults.
  void reject_unknown() const {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) fail(field(key), "unknown field");
  }

 private:
  const json& obj_;
  std::string path_;
  mutable std::set<std::string> seen_;
};

inline std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline OptimizerConfig parse_optimizer(const json& j) {
  const FieldReader f(j, "optimizer");
  OptimizerConfig c;
  const std::string preset = f.string("preset", "set1");
  if (preset == "set2")
    c = OptimizerConfig::set2();
  else if (preset != "set1")
    FieldReader::fail("optimizer.preset", "expected \"set1\" or \"set2\"");
  c.population_size = f.unsigned_integer("population_size", c.population_size);
  c.max_generations = f.unsigned_integer("max_generations", c.max_generations);
  c.crossover_rate = f.number("crossover_rate", c.crossover_rate);
  c.mutation_rate = f.number("mutation_rate", c.mutation_rate);
  c.mutation_scale = f.number("mutation_scale", c.mutation_scale);
  c.cognitive_weight = f.number("cognitive_weight", c.cognitive_weight);
  c.social_weight = f.number("social_weight", c.social_weight);
  c.inertia_start = f.number("inertia_start", c.inertia_start);
  c.inertia_end = f.number("inertia_end", c.inertia_end);
  c.velocity_cap_fraction = f.number("velocity_cap_fraction", c.velocity_cap_fraction);
  c.convergence_epsilon = f.number("convergence_epsilon", c.convergence_epsilon);
  c.convergence_patience = f.unsigned_integer("convergence_patience", c.convergence_patience);
  c.monte_carlo_samples = f.unsigned_integer("monte_carlo_samples", c.monte_carlo_samples);
  const std::string schedule = f.string("hybrid_schedule", "interleaved");
  if (schedule == "interleaved")
    c.hybrid_schedule = HybridSchedule::interleaved;
  else if (schedule == "sequential")
    c.hybrid_schedule = HybridSchedule::sequential;
  else
    FieldReader::fail("optimizer.hybrid_schedule", "expected \"interleaved\" or \"sequential\"");
  c.ga_fraction = f.number("ga_fraction", c.ga_fraction);
  f.reject_unknown();
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("field 'optimizer': " + std::string(e.what()));
  }
  return c;
}

inline ScenarioEntry parse_scenario(const json& j, std::size_t index) {
  const std::string path = "scenarios[" + std::to_string(index) + "]";
  const FieldReader f(j, path);
  ScenarioEntry s;
  if (!f.has("area")) FieldReader::fail(path + ".area", "missing required field");
  const json& area = f.raw("area");
  if (!area.is_array() || area.size() != 2 || !area[0].is_number() || !area[1].is_number())
    FieldReader::fail(path + ".area", "expected [M, N] in meters");
  s.area = {area[0].get<double>(), area[1].get<double>()};
  if (!f.has("rs")) FieldReader::fail(path + ".rs", "missing required field");
  s.rs = f.number("rs", 0.0);
  s.rc = f.number("rc", 2.0 * s.rs);
  s.coverage_target = f.number("coverage_target", s.coverage_target);
  s.id = f.string("id", default_scenario_id(s.area, s.rs, s.rc));
  if (s.id.empty()) FieldReader::fail(path + ".id", "must not be empty");
  f.reject_unknown();
  return s;
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON at " + detail::line_column(text, e.byte) + ": " + e.what());
  }
  const detail::FieldReader f(root, "");
  ExperimentConfig c;

  if (!f.has("scenarios")) detail::FieldReader::fail("scenarios", "missing required field");
  const json& scenarios = f.raw("scenarios");
  if (!scenarios.is_array()) detail::FieldReader::fail("scenarios", "expected an array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    c.scenarios.push_back(detail::parse_scenario(scenarios[i], i));
    if (!ids.insert(c.scenarios.back().id).second)
      detail::FieldReader::fail("scenarios[" + std::to_string(i) + "].id",
                                "duplicate scenario id '" + c.scenarios.back().id + "'");
  }

  if (f.has("optimizer")) c.optimizer = detail::parse_optimizer(f.raw("optimizer"));

  if (f.has("weights")) {
    const detail::FieldReader w(f.raw("weights"), "weights");
    c.weights.coverage = w.number("coverage", c.weights.coverage);
    c.weights.connectivity = w.number("connectivity", c.weights.connectivity);
    c.weights.energy = w.number("energy", c.weights.energy);
    w.reject_unknown();
    try {
      c.weights.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("field 'weights': " + std::string(e.what()));
    }
  }

  if (f.has("energy")) {
    const detail::FieldReader e(f.raw("energy"), "energy");
    c.energy.e_elec = e.number("e_elec", c.energy.e_elec);
    c.energy.e_amp = e.number("e_amp", c.energy.e_amp);
    const std::uint64_t bits = e.unsigned_integer("packet_bits", c.energy.packet_bits);
    if (bits == 0 || bits > static_cast<std::uint64_t>(std::numeric_limits<int>::max()))
      detail::FieldReader::fail("energy.packet_bits", "expected a positive integer");
    c.energy.packet_bits = static_cast<int>(bits);
    c.energy.e_max = e.number("e_max", c.energy.e_max);
    e.reject_unknown();
  }

  if (f.has("search")) {
    const detail::FieldReader s(f.raw("search"), "search");
    c.search.retries_per_n = s.unsigned_integer("retries_per_n", c.search.retries_per_n);
    c.search.mc_tolerance = s.number("mc_tolerance", c.search.mc_tolerance);
    c.search.verify_samples = s.unsigned_integer("verify_samples", c.search.verify_samples);
    s.reject_unknown();
    try {
      c.search.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("field 'search': " + std::string(e.what()));
    }
  }

  if (f.has("seeds")) {
    const json& seeds = f.raw("seeds");
    if (!seeds.is_array()) detail::FieldReader::fail("seeds", "expected an array of integers");
    c.seeds.clear();
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      if (!seeds[i].is_number_unsigned())
        detail::FieldReader::fail("seeds[" + std::to_string(i) + "]", "expected a non-negative integer");
      c.seeds.push_back(seeds[i].get<std::uint64_t>());
    }
  }

  c.override_rc_check = f.boolean("override_rc_check", false);
  f.reject_unknown();
  return c;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  json scenarios = json::array();
  for (const ScenarioEntry& s : c.scenarios)
    scenarios.push_back({{"id", s.id},
                         {"area", {s.area.width, s.area.height}},
                         {"rs", s.rs},
                         {"rc", s.rc},
                         {"coverage_target", s.coverage_target}});
  const OptimizerConfig& o = c.optimizer;
  json optimizer = {
      {"population_size", o.population_size},
      {"max_generations", o.max_generations},
      {"crossover_rate", o.crossover_rate},
      {"mutation_rate", o.mutation_rate},
      {"mutation_scale", o.mutation_scale},
      {"cognitive_weight", o.cognitive_weight},
      {"social_weight", o.social_weight},
      {"inertia_start", o.inertia_start},
      {"inertia_end", o.inertia_end},
      {"velocity_cap_fraction", o.velocity_cap_fraction},
      {"convergence_epsilon", o.convergence_epsilon},
      {"convergence_patience", o.convergence_patience},
      {"monte_carlo_samples", o.monte_carlo_samples},
      {"hybrid_schedule", o.hybrid_schedule == HybridSchedule::interleaved ? "interleaved" : "sequential"},
      {"ga_fraction", o.ga_fraction},
  };
  json energy = {{"e_elec", c.energy.e_elec},
                 {"e_amp", c.energy.e_amp},
                 {"packet_bits", c.energy.packet_bits},
                 {"e_max", std::isfinite(c.energy.e_max) ? json(c.energy.e_max) : json(nullptr)}};
  return {{"scenarios", scenarios},
          {"optimizer", optimizer},
          {"weights",
           {{"coverage", c.weights.coverage},
            {"connectivity", c.weights.connectivity},
            {"energy", c.weights.energy}}},
          {"energy", energy},
          {"search",
           {{"retries_per_n", c.search.retries_per_n},
            {"mc_tolerance", c.search.mc_tolerance},
            {"verify_samples", c.search.verify_samples}}},
          {"seeds", c.seeds},
          {"override_rc_check", c.override_rc_check}};
}

inline std::string serialize_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Looks a scenario up by id, or by zero-based index when `key` is numeric.
inline const ScenarioEntry& find_scenario(const ExperimentConfig& c, const std::string& key) {
  for (const ScenarioEntry& s : c.scenarios)
    if (s.id == key) return s;
  if (!key.empty() && key.find_first_not_of("0123456789") == std::string::npos) {
    const std::size_t index = std::stoul(key);
    if (index < c.scenarios.size()) return c.scenarios[index];
  }
  throw ConfigError("no scenario with id or index '" + key + "'");
}

}  // namespace wsnopt
