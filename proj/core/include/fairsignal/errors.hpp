#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairsignal {

// Malformed user input: bad instance, bad scheme file, out-of-range parameter.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A scheme whose mass-weighted posteriors do not reproduce the prior.
class PlausibilityError : public InvalidInput {
 public:
  PlausibilityError(std::size_t value_index, const std::string& what)
      : InvalidInput(what), value_index_(value_index) {}

  std::size_t value_index() const noexcept { return value_index_; }

 private:
  std::size_t value_index_;
};

// A guarantee the construction is supposed to maintain was observed to fail.
// Always a bug, never a property of the input.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace fairsignal
