#pragma once

#include <stdexcept>
#include <string>

namespace jcsta {

// Process exit codes used by the command-line tool.
enum class ExitCode : int { ok = 0, config = 2, numerical = 3, io = 4 };

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }
  ExitCode exit_code() const noexcept override { return ExitCode::config; }

 private:
  std::string path_;
};

class IoError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::io; }
};

class NumericalError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::numerical; }
};

class RangeError : public NumericalError { using NumericalError::NumericalError; };
class DimensionError : public NumericalError { using NumericalError::NumericalError; };
class SingularError : public NumericalError { using NumericalError::NumericalError; };
class DegeneracyError : public NumericalError { using NumericalError::NumericalError; };
class MeasurementError : public NumericalError { using NumericalError::NumericalError; };
class IntegrationError : public NumericalError { using NumericalError::NumericalError; };
class FitError : public NumericalError { using NumericalError::NumericalError; };
class TruncationError : public NumericalError { using NumericalError::NumericalError; };

}  // namespace jcsta
