#pragma once

#include <stdexcept>
#include <string>

namespace wsnopt {

// Exit codes shared by the CLI. The library throws; the CLI maps.
enum class ErrorKind : int {
  config = 2,
  invalid_scenario = 3,
  search_exhausted = 4,
  test = 5,
  io = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct ScenarioError : Error {
  explicit ScenarioError(const std::string& what)
      : Error(ErrorKind::invalid_scenario, what) {}
};

struct SearchExhausted : Error {
  explicit SearchExhausted(const std::string& what)
      : Error(ErrorKind::search_exhausted, what) {}
};

// Pairing failures and statistically undefined tests.
struct TestError : Error {
  explicit TestError(const std::string& what) : Error(ErrorKind::test, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace wsnopt
