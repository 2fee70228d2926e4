#pragma once

#include <stdexcept>
#include <string>

namespace scalarcf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SCALARCF_DEFINE_ERROR(Name)         \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

SCALARCF_DEFINE_ERROR(NotSkew);
SCALARCF_DEFINE_ERROR(Degenerate);
SCALARCF_DEFINE_ERROR(InvalidRotation);
SCALARCF_DEFINE_ERROR(InvalidBank);
SCALARCF_DEFINE_ERROR(DimensionMismatch);
SCALARCF_DEFINE_ERROR(NotVectorBank);
SCALARCF_DEFINE_ERROR(CollinearReferences);
SCALARCF_DEFINE_ERROR(NoSolution);
SCALARCF_DEFINE_ERROR(ConfigurationMismatch);
SCALARCF_DEFINE_ERROR(DegenerateGeometry);
SCALARCF_DEFINE_ERROR(IncompatibleVariant);
SCALARCF_DEFINE_ERROR(EmptyInput);
SCALARCF_DEFINE_ERROR(IoError);

#undef SCALARCF_DEFINE_ERROR

/// Raised when the integrator produces NaN/Inf; carries the offending step.
class NonFiniteState : public Error {
 public:
  NonFiniteState(const std::string& what, long step) : Error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

/// Configuration parse/validation failure with source position.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line, std::string field)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line),
        field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

}  // namespace scalarcf
