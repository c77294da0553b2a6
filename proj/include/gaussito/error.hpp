#pragma once

#include <stdexcept>
#include <string>

namespace gaussito {

enum class ErrorCode {
  domain = 1,
  invalid_argument = 2,
  unsupported = 3,
  numerical = 4,
  config = 5,
  io = 6,
};

/// Base exception for the library. The code maps one-to-one onto the C API
/// status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::domain, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::invalid_argument, what) {}
};

class UnsupportedIntegrator : public Error {
 public:
  explicit UnsupportedIntegrator(const std::string& what) : Error(ErrorCode::unsupported, what) {}
};

class SimulationError : public Error {
 public:
  explicit SimulationError(const std::string& what) : Error(ErrorCode::numerical, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::config, what) {}
};

}  // namespace gaussito
