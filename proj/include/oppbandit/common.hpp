#pragma once

#include <stdexcept>

namespace oppbandit {

// Thrown when an exact computation would exceed its configured resource cap.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a numeric routine cannot produce a result (singular or
// reducible chain, empty sample, ...).
struct ComputationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace oppbandit
