#pragma once

#include <stdexcept>
#include <string>

namespace lgallee {

/// Parameter or configuration outside its admissible set.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite input, or a point where a field is singular.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// N <= 0 for the dimensional system.
class SingularityError : public DomainError {
public:
  using DomainError::DomainError;
};

/// An operation was called outside its documented precondition.
class PreconditionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// A numerical procedure could not produce a result (step underflow,
/// manifold never reaching a section, ...).
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Reading or writing an output file failed.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace lgallee
