#pragma once

#include <stdexcept>
#include <string>

namespace levycouple {

// Bad input to a library call (precondition violation).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed configuration: unknown preset, unparsable key, missing seed.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical guard tripped (jump-count overflow, path drift, non-finite value).
class NumericalGuard : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace levycouple
