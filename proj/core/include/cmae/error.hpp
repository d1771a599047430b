#pragma once

#include <stdexcept>
#include <string>

namespace cmae {

// Bad or inconsistent run configuration (unknown task, invalid periods, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A caller broke an operation's precondition (out-of-range index, malformed
// payoff table, non-finite input, ...).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// A probability/entropy query on a counter that has seen no data.
class UndefinedDistribution : public std::runtime_error {
 public:
  explicit UndefinedDistribution(const std::string& what) : std::runtime_error(what) {}
};

// Not enough records to compute a metric.
class InsufficientData : public std::runtime_error {
 public:
  explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cmae
