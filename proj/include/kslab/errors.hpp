#pragma once

#include <stdexcept>

namespace kslab {

// Bad user-facing configuration (CLI exit code 2).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runtime numerical failure: NaN blowup, unreachable tolerance (CLI exit code 3).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kslab
