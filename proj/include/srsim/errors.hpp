#pragma once

#include <stdexcept>
#include <string>

namespace srsim {

/// Bad scenario file, out-of-range parameter, infeasible geometry.
/// The CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A run-time invariant was violated mid-simulation. Exit code 2.
struct InvariantError : std::runtime_error {
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace srsim
