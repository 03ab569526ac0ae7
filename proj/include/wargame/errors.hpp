#pragma once

#include <stdexcept>
#include <string>

#include "wargame/findings.hpp"

namespace wargame {

/// Base for all domain errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Input could not be parsed or violates a schema.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// A lookup referenced something that does not exist.
class NotFoundError : public Error {
  public:
    using Error::Error;
};

/// An operation was handed a value that violates its preconditions.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// Carries the full finding list for a rejected document.
class ValidationFailed : public Error {
  public:
    explicit ValidationFailed(ValidationReport report)
        : Error("validation failed"), report_(std::move(report)) {}
    [[nodiscard]] const ValidationReport& report() const { return report_; }

  private:
    ValidationReport report_;
};

}  // namespace wargame
