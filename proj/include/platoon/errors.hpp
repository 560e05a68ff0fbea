#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace platoon {

/// Matrix/vector shapes that do not fit the operation.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke a documented precondition of a stateful call.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A search (bisection, grid scan) found no admissible value.
class NoSolution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulation produced a non-finite state. Carries the run coordinates
/// so the CLI can report where the failure happened.
class NumericFailure : public std::runtime_error {
 public:
  NumericFailure(const std::string& what, std::size_t step,
                 std::optional<std::size_t> profile = std::nullopt,
                 std::optional<std::size_t> run = std::nullopt)
      : std::runtime_error(what), step_(step), profile_(profile), run_(run) {}

  std::size_t step() const noexcept { return step_; }
  std::optional<std::size_t> profile() const noexcept { return profile_; }
  std::optional<std::size_t> run() const noexcept { return run_; }

 private:
  std::size_t step_;
  std::optional<std::size_t> profile_;
  std::optional<std::size_t> run_;
};

/// Invalid experiment configuration; `key()` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message),
        key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace platoon
