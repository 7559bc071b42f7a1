#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace efq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (length mismatch, unbound variable, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input: structure files, quantifier specs, workspace references.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at offset " + std::to_string(position)), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Raised when an exponential search would exceed one of the configured caps.
class CapExceeded : public Error {
 public:
  CapExceeded(std::string cap, long long limit, long long actual)
      : Error("cap '" + cap + "' exceeded: limit " + std::to_string(limit) + ", needed " +
              std::to_string(actual)),
        cap_(std::move(cap)),
        limit_(limit),
        actual_(actual) {}

  const std::string& cap() const { return cap_; }
  long long limit() const { return limit_; }
  long long actual() const { return actual_; }

 private:
  std::string cap_;
  long long limit_;
  long long actual_;
};

}  // namespace efq
