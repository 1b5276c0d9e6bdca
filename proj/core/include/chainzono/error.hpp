#pragma once

#include <stdexcept>
#include <string>

namespace chainzono {

/// Argument shapes or values that violate an operation's preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation that requires a nonempty set received an empty one.
class EmptySetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No sector of a segmented ring intersects the prior set.
class NoActiveSectorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Measurements that cannot be reconciled with the declared noise bounds.
class InconsistentMeasurementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace chainzono
