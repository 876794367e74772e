#pragma once

#include <stdexcept>
#include <string>

namespace bq {

// Bad arguments: shape mismatches, out-of-range parameters, NaN input.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or truncated files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A quantizer could not be fitted on the given data (rank deficiency, too few samples).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bq
