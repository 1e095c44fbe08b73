#pragma once

#include <stdexcept>
#include <string>

namespace tradescope {

/// Broad failure class; the CLI maps each one to an exit code.
enum class ErrorKind { Validation, Io, Pipeline, Backend };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::Validation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class PipelineError : public Error {
 public:
  explicit PipelineError(const std::string& what)
      : Error(ErrorKind::Pipeline, what) {}
};

enum class BackendFailure {
  UnknownBackend,
  DuplicateBackend,
  UnsupportedScale,
  Spawn,
  NonzeroExit,
  Timeout,
  Protocol,
  DimsViolation,
  WeightMismatch,
  Truncated,
  NonFinite,
};

const char* to_string(BackendFailure failure) noexcept;

class BackendError : public Error {
 public:
  BackendError(BackendFailure failure, const std::string& what)
      : Error(ErrorKind::Backend, what), failure_(failure) {}

  BackendFailure failure() const noexcept { return failure_; }

 private:
  BackendFailure failure_;
};

}  // namespace tradescope
