#pragma once

#include <stdexcept>
#include <string>

namespace pjb {

/// Invalid input: malformed word, mismatched dimensions, bad grid or
/// tolerances. Maps to CLI exit status 1.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The input was valid but the computation could not produce a
/// trustworthy result (eigensolver non-convergence, defective spectrum,
/// indefinite metric). Maps to CLI exit status 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pjb
