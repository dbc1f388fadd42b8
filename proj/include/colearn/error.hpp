#pragma once

#include <stdexcept>
#include <string>

namespace colearn {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value, unknown key, or inconsistent dimensions
// between configured inputs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Plan vectors, targets or envelopes that disagree on the plan size m.
class DimensionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Selection list with a missing, duplicate or out-of-range entry.
class SelectionError : public Error {
 public:
  using Error::Error;
};

// Satisfaction rate requested with zero trials.
class UndefinedRateError : public Error {
 public:
  using Error::Error;
};

// Malformed plan file, constraint file, config file or CSV.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Brute-force enumeration refused because the combination count exceeds the cap.
class OracleCapError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace colearn
