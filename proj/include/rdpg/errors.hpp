#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rdpg {

/// Malformed or non-finite input, violated preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a quantity (e.g. a likelihood
/// evaluated on entries outside [0,1]).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A latent configuration or probability matrix that cannot come from an RDPG.
class ModelViolation : public std::invalid_argument {
 public:
  ModelViolation(const std::string& what,
                 std::vector<std::pair<std::size_t, std::size_t>> pairs = {})
      : std::invalid_argument(what), offending_pairs(std::move(pairs)) {}

  std::vector<std::pair<std::size_t, std::size_t>> offending_pairs;
};

/// Generator configuration outside its supported region.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative kernel failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual_a, double residual_b = 0.0)
      : std::runtime_error(what), residual(residual_a), secondary_residual(residual_b) {}

  double residual;
  double secondary_residual;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line_no)
      : std::runtime_error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}

  std::size_t line;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rdpg
