#pragma once

#include <stdexcept>
#include <string>

namespace darcnn {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values (thresholds out of range, empty anchor config).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input outside an operation's domain (e.g. no ground truths to evaluate against).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A decoded box collapsed to non-positive size.
class DegenerateBoxError : public Error {
 public:
  using Error::Error;
};

// Malformed file content.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Scene synthesis could not satisfy its constraints.
class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace darcnn
