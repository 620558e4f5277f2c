#pragma once

#include <stdexcept>

namespace hisom {

// Input violates an operation's precondition: bad parameters, dimension
// mismatch, wrong isometric constant, malformed file.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested invariant or expansion is not available for this family.
class NotInCatalog : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A verification step failed: nonzero residual, non-equivalent maps,
// iteration without a fixed point.
class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hisom
