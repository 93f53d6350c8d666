#pragma once

#include <stdexcept>
#include <string>

namespace drl {

// Broken precondition or invariant: a bug in the caller, not a data problem.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Bad user input (unknown names, malformed configs, missing files).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite losses, gradients or predictions during training.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation would exceed a tractability guard.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace drl
