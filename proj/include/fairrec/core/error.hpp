#ifndef FAIRREC_CORE_ERROR_HPP_
#define FAIRREC_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace fairrec {

// Invalid user-supplied configuration or arguments (CLI exit code 1).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// File access or parse failure (CLI exit code 3).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Data that violates a precondition of an operation, e.g. a group that is
// too small to split or a user without candidate items.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss or failed to converge.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fairrec

#endif  // FAIRREC_CORE_ERROR_HPP_
