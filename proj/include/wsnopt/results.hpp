#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wsnopt/config.hpp"
#include "wsnopt/error.hpp"
#include "wsnopt/geometry.hpp"
#include "wsnopt/records.hpp"
#include "wsnopt/search.hpp"
#include "wsnopt/stats.hpp"

namespace wsnopt {

// ---------------------------------------------------------------------------
// CSV (RFC 4180: comma separated, CRLF-tolerant, double-quote escaping)

namespace csv {

inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

inline std::string join(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += escape(fields[i]);
  }
  return line;
}

// Splits a whole document into rows of fields.
inline std::vector<std::vector<std::string>> parse(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, field_started = false;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (ch == ',') {
      end_field();
    } else if (ch == '\r') {
      continue;
    } else if (ch == '\n') {
      end_row();
    } else {
      field += ch;
      field_started = true;
    }
  }
  if (quoted) throw IoError("unterminated quoted CSV field");
  if (field_started || !row.empty()) end_row();
  return rows;
}

}  // namespace csv

inline const std::vector<std::string>& run_record_columns() {
  static const std::vector<std::string> columns = {
      "scenario", "algorithm",    "seed",    "status",           "n_nodes",
      "coverage", "connectivity_ratio", "is_connected", "energy_total", "fitness",
      "generations_used", "wall_time"};
  return columns;
}

inline std::string run_record_header() { return csv::join(run_record_columns()); }

namespace detail {
inline std::string printf_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}
}  // namespace detail

// Coverage and ratios to 6 decimals, energy in scientific notation, wall time
// in milliseconds resolution. wall_time is the last column.
inline std::string format_run_record(const RunRecord& r) {
  return csv::join({r.scenario, r.algorithm, std::to_string(r.seed), r.status,
                    std::to_string(r.n_nodes), detail::printf_double("%.6f", r.coverage),
                    detail::printf_double("%.6f", r.connectivity_ratio),
                    r.is_connected ? "true" : "false", detail::printf_double("%.6e", r.energy_total),
                    detail::printf_double("%.6f", r.fitness), std::to_string(r.generations_used),
                    detail::printf_double("%.3f", r.wall_time)});
}

inline RunRecord parse_run_record(const std::vector<std::string>& f) {
  if (f.size() != run_record_columns().size())
    throw IoError("results row has " + std::to_string(f.size()) + " fields, expected " +
                  std::to_string(run_record_columns().size()));
  auto to_u64 = [](const std::string& s) -> std::uint64_t {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw IoError("bad integer '" + s + "' in results CSV");
    return v;
  };
  auto to_double = [](const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw IoError("bad number '" + s + "' in results CSV");
    return v;
  };
  try {
    RunRecord r;
    r.scenario = f[0];
    r.algorithm = f[1];
    r.seed = to_u64(f[2]);
    r.status = f[3];
    r.n_nodes = to_u64(f[4]);
    r.coverage = to_double(f[5]);
    r.connectivity_ratio = to_double(f[6]);
    if (f[7] != "true" && f[7] != "false") throw IoError("bad boolean '" + f[7] + "' in results CSV");
    r.is_connected = f[7] == "true";
    r.energy_total = to_double(f[8]);
    r.fitness = to_double(f[9]);
    r.generations_used = to_u64(f[10]);
    r.wall_time = to_double(f[11]);
    return r;
  } catch (const std::logic_error&) {
    throw IoError("malformed results row starting with '" + f[0] + "'");
  }
}

inline std::vector<RunRecord> parse_run_records(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows.front() != run_record_columns())
    throw IoError("results CSV header does not match the run-record schema");
  std::vector<RunRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() == 1 && rows[i][0].empty()) continue;
    out.push_back(parse_run_record(rows[i]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// Appends rows, writing the header first if the file is new or empty.
inline void append_run_records(const std::filesystem::path& path, const std::vector<RunRecord>& rows) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to '" + path.string() + "'");
  if (fresh) out << run_record_header() << "\n";
  for (const RunRecord& r : rows) out << format_run_record(r) << "\n";
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline std::string format_run_records(const std::vector<RunRecord>& rows) {
  std::string out = run_record_header() + "\n";
  for (const RunRecord& r : rows) out += format_run_record(r) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Deployment JSON: [[x, y], ...]

inline std::string deployment_to_json(const Deployment& d) {
  if (d.empty()) return "[]\n";
  std::string out = "[\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    out += "  [" + nlohmann::json(d.nodes[i].x).dump() + ", " + nlohmann::json(d.nodes[i].y).dump() + "]";
    out += i + 1 < d.size() ? ",\n" : "\n";
  }
  return out + "]\n";
}

inline Deployment deployment_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("deployment must be an array of [x, y] pairs");
  Deployment d;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ConfigError("deployment entries must be [x, y] number pairs");
    d.nodes.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return d;
}

inline nlohmann::json deployment_json_value(const Deployment& d) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Point& p : d.nodes) arr.push_back({p.x, p.y});
  return arr;
}

inline nlohmann::json report_to_json(const FeasibilityReport& r, const std::string& scenario,
                                     const std::string& algorithm, std::size_t verify_samples) {
  return {{"scenario", scenario},
          {"algorithm", algorithm},
          {"n", r.n},
          {"feasible", r.feasible},
          {"verified_coverage", r.verified_coverage},
          {"connectivity_ratio", r.connectivity_ratio},
          {"is_connected", r.is_connected},
          {"per_node_energy_ok", r.per_node_energy_ok},
          {"search_coverage", r.evaluation.coverage},
          {"energy_total", r.evaluation.energy_total},
          {"fitness", r.evaluation.fitness},
          {"generations_used", r.generations_used},
          {"attempts", r.attempts},
          {"seed", r.seed},
          {"verification_seed", r.verification_seed},
          {"verify_samples", verify_samples},
          {"wall_time", r.wall_time},
          {"deployment", deployment_json_value(r.deployment)}};
}

inline nlohmann::json wilcoxon_to_json(const WilcoxonResult& w, const PairedSample& s,
                                       const std::string& metric) {
  return {{"label_a", s.label_a},
          {"label_b", s.label_b},
          {"metric", metric},
          {"alternative", std::string(to_string(w.alternative))},
          {"method", std::string(to_string(w.method))},
          {"n_effective", w.n_effective},
          {"w_statistic", w.w_statistic},
          {"w_plus", w.w_plus},
          {"w_minus", w.w_minus},
          {"p_value", w.p_value}};
}

// ---------------------------------------------------------------------------
// SVG rendering

inline constexpr double kSvgWidth = 800.0;

// Region border, one dashed communication circle, one sensing circle and one
// dot per node. y grows upward in region coordinates and downward in SVG.
inline std::string render_svg(const Deployment& d, const Scenario& scenario) {
  const Region& region = scenario.region;
  const double scale = kSvgWidth / region.width;
  const double height = region.height * scale;
  auto num = [](double v) { return detail::printf_double("%.3f", v); };
  auto sx = [&](double x) { return num(x * scale); };
  auto sy = [&](double y) { return num(height - y * scale); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(kSvgWidth)
      << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(kSvgWidth) << " "
      << num(height) << "\">\n"
      << "  <title>" << d.size() << " nodes, " << format_number(region.width) << "x"
      << format_number(region.height) << " m, rs=" << format_number(scenario.rs)
      << " m, rc=" << format_number(scenario.rc) << " m</title>\n"
      << "  <rect x=\"0\" y=\"0\" width=\"" << num(kSvgWidth) << "\" height=\"" << num(height)
      << "\" fill=\"white\" stroke=\"black\" stroke-width=\"2\"/>\n";
  out << "  <g id=\"communication\" fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"4 4\">\n";
  for (const Point& p : d.nodes)
    out << "    <circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y) << "\" r=\""
        << num(scenario.rc * scale) << "\"/>\n";
  out << "  </g>\n";
  out << "  <g id=\"sensing\" fill=\"#1f77b4\" fill-opacity=\"0.15\" stroke=\"#1f77b4\">\n";
  for (const Point& p : d.nodes)
    out << "    <circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y) << "\" r=\""
        << num(scenario.rs * scale) << "\"/>\n";
  out << "  </g>\n";
  out << "  <g id=\"nodes\" fill=\"#0000cc\">\n";
  for (const Point& p : d.nodes)
    out << "    <circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y) << "\" r=\"3\"/>\n";
  out << "  </g>\n</svg>\n";
  return out.str();
}

}  // namespace wsnopt
