#pragma once

#include <stdexcept>
#include <string>

namespace cag {

// A problem evaluation produced a non-finite value, usually because L is
// set too small and an iterate ran off.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal algebraic identity was violated or a state precondition broke.
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A problem or run description is malformed.
class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-positive curvature estimate along a search direction.
class CurvatureFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// y^T p vanished in the Hager-Zhang formula.
class DegenerateDirection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cag
