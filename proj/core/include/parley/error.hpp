#pragma once

#include <stdexcept>

namespace parley {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent game/issue/agent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A value label that does not exist in the issue's payoff table.
class UnknownLabelError : public Error {
 public:
  using Error::Error;
};

// Enumeration would exceed the configured allocation cap.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

// Agent backend failed to produce a completion (after retries, if any).
class BackendError : public Error {
 public:
  using Error::Error;
};

// Tournament scheduling precondition violated.
class SchedulingError : public Error {
 public:
  using Error::Error;
};

}  // namespace parley
