#pragma once

#include <stdexcept>
#include <string>

namespace dbc {

/// Machine-readable failure category; the CLI maps these to exit codes.
enum class ErrorCategory { invalid_input, solver_failure, config_error, io_error };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what) : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error(ErrorCategory::invalid_input, what) {}
};

/// An iterative or direct solve did not reach its tolerance.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double residual, int iterations)
      : Error(ErrorCategory::solver_failure, what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config_error, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io_error, what) {}
};

const char* category_name(ErrorCategory c);

}  // namespace dbc
