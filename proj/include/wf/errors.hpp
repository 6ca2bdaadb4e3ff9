#pragma once

#include <stdexcept>
#include <string>

namespace wf {

// Base class for all worldfeat errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem-level read/write failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents: bad magic, bad header, schema violation.
class FormatError : public Error {
 public:
  using Error::Error;
};

// File payload shorter or longer than its header promises.
class TruncationError : public FormatError {
 public:
  using FormatError::FormatError;
};

// A documented precondition was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Transform not invertible under the determinant floor.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Point at infinity or other non-finite projective arithmetic.
class NumericDomainError : public Error {
 public:
  using Error::Error;
};

// Input carries no usable signal (constant frame, zero mass, empty overlap).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace wf
