#pragma once

#include <stdexcept>
#include <string>

namespace catlyap {

// Root of every error the library raises. Each subclass names one failed
// precondition so callers can branch on the type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotUnimodular : public Error {
 public:
  using Error::Error;
};

class NotHyperbolic : public Error {
 public:
  using Error::Error;
};

class UnsupportedGeometry : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class NotMonotoneAlongUnstable : public Error {
 public:
  using Error::Error;
};

class DegenerateRotation : public Error {
 public:
  using Error::Error;
};

class StraddlesDiscontinuity : public Error {
 public:
  using Error::Error;
};

class ResolutionExhausted : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace catlyap
