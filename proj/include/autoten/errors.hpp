#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace autoten {

/// Raised when a solver produces a non-finite value.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& what, std::size_t iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

private:
  std::size_t iteration_;
};

/// Raised by a rank selector that has no usable solutions to choose from.
class EstimationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File access or parse failure; the message carries the path.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace autoten
