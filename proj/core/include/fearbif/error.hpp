#pragma once

#include <stdexcept>
#include <string>

namespace fearbif {

/// Invalid input: bad parameters, unavailable branch, missing bracket.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that was well posed but could not be completed
/// (singular system, blow-up, inconsistent root branch, degeneracy).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fearbif
