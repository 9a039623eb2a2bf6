#pragma once

#include <cstdint>
#include <string>

namespace wsnopt {

// One engine outcome on one scenario with one seed. This is the row type of
// the long-format results CSV.
struct RunRecord {
  std::string scenario;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::string status = "ok";
  std::size_t n_nodes = 0;
  double coverage = 0.0;
  double connectivity_ratio = 0.0;
  bool is_connected = false;
  double energy_total = 0.0;
  double fitness = 0.0;
  std::size_t generations_used = 0;
  double wall_time = 0.0;

  bool ok() const { return status == "ok"; }

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

}  // namespace wsnopt
