#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace joinforge {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A call violated an operation's preconditions (wrong arity, mismatched
// bases, unsupported regime).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Input data is malformed: bad vertex words, missing weights, repeated
// particles, unparsable instance files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Exponents or constants fail the conjugacy constraints.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Orbit enumeration refused because the orbit is larger than the guard.
class GuardExceeded : public Error {
 public:
  GuardExceeded(std::uint64_t estimate, std::uint64_t guard)
      : Error("orbit of estimated size " + std::to_string(estimate) +
              " exceeds the enumeration guard " + std::to_string(guard) +
              "; use the factorized evaluator"),
        estimate_(estimate),
        guard_(guard) {}

  std::uint64_t estimate() const { return estimate_; }
  std::uint64_t guard() const { return guard_; }

 private:
  std::uint64_t estimate_;
  std::uint64_t guard_;
};

}  // namespace joinforge
