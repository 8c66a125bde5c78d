#pragma once

#include <stdexcept>

namespace twinbeam {

// An exact-path computation would exceed its configured size cap. Callers
// are expected to switch to the Gaussian sampling path instead.
class ResourceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative numerical procedure exhausted its iteration budget.
class ConvergenceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace twinbeam
