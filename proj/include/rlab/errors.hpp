#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rlab {

// Precondition violations: bad sizes, nonpositive parameters, mismatched dims.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The operation exists but not for this measure family or grid layout.
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Input is valid but the operation has nothing to work with (e.g. zero density).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericFailure : public std::runtime_error {
 public:
  NumericFailure(const std::string& what, std::size_t iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace rlab
