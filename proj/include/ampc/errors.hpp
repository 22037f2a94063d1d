#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ampc {

/// Invalid or non-finite quantities fed into a model or estimator operation.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Forward simulation produced a non-finite state.
struct RolloutError : std::runtime_error {
  std::size_t failing_index;

  RolloutError(const std::string& what, std::size_t index)
      : std::runtime_error(what), failing_index(index) {}
};

/// A CFTOC solve could not proceed (the committed iterate diverged).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Configuration file failed to parse or validate.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An output file could not be written or an input file read.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ampc
