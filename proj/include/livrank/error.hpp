#pragma once

#include <stdexcept>
#include <string>

namespace livrank {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or arguments (maps to the usage exit code).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data: manifests, surveys, logs, rasters.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Transport failure, HTTP non-success, or retries exhausted against the remote judge.
class RemoteJudgeError : public Error {
 public:
  using Error::Error;
};

/// Model text without a recognisable final A/B verdict.
class UnparseableVerdict : public Error {
 public:
  using Error::Error;
};

/// Majority vote that never reached the required agreement.
class UndecidedError : public Error {
 public:
  using Error::Error;
};

}  // namespace livrank
