#pragma once

#include <stdexcept>
#include <string>

namespace spinfe {

// Invalid configuration or input file contents.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative procedure failed to converge, or a linear-algebra factorization
// broke down beyond the allowed tolerance.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spinfe
