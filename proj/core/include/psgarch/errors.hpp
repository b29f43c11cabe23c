#pragma once

#include <stdexcept>
#include <string>

namespace psgarch {

// Base of every error raised by the library. The CLI maps InvalidInput,
// InvalidConfiguration and DegenerateInput to exit code 2 and
// NumericFailure to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidConfiguration : public Error {
 public:
  using Error::Error;
};

// The data carry no usable information (constant series, zero denominator).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class NumericFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace psgarch
