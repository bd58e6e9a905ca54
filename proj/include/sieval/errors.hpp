#pragma once

#include <stdexcept>
#include <string>

namespace sieval {

// Precondition violations: bad arguments, unknown tags, wrong metric sets.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Data that failed a contract check (rejected records, misaligned example
// sets, sample shortfalls). Maps to the "validation failures" exit code.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Transport or authentication failure talking to a generation endpoint.
// Always retryable.
class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sieval
