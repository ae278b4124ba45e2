#pragma once

#include <stdexcept>
#include <string>

namespace ringqubit {

// Raised when a computation cannot deliver its accuracy contract (non-convergence,
// singular trajectories, saturated occupations). Bad inputs use std::invalid_argument.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ringqubit
