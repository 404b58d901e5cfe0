#pragma once

#include <stdexcept>

namespace eprbound {

/// Bad user input: config schema, unknown catalog names, invalid parameters.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure: non-convergence, loss of positivity, saturation.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace eprbound
