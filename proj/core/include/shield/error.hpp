#pragma once

#include <stdexcept>
#include <string>

namespace shield {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition (bad dimensions, q out of
// range, negative eps, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed configuration document or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

enum class IoErrorKind {
  kOpenFailed,
  kWriteFailed,
  kBadMagic,
  kUnsupportedVersion,
  kTruncated,
  kBadLabel,
  kBadHeader,
};

const char* to_string(IoErrorKind kind);

class IoError : public Error {
 public:
  IoError(IoErrorKind kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  IoErrorKind kind() const noexcept { return kind_; }

 private:
  IoErrorKind kind_;
};

}  // namespace shield
