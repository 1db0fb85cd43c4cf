#pragma once

#include <stdexcept>
#include <string>

namespace anng {

/// A real-valued argument fell outside the domain of a formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A precondition on parameters (not on data) was violated.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A file on disk could not be decoded.
class FormatError : public std::runtime_error {
 public:
  enum class Kind { Malformed, VersionMismatch, Checksum, Io };

  FormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// An internal invariant failed; indicates a bug rather than bad input.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace anng
