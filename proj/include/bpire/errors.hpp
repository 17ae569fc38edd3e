#pragma once

#include <stdexcept>
#include <string>

namespace bpire {

/// Argument outside the mathematical domain of an operation (index out of
/// range, n = 0, s outside [0,1), non-finite input, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Increment law parameter outside its declared range. `parameter()` names
/// the offending field.
class InvalidLawError : public DomainError {
 public:
  InvalidLawError(std::string parameter, const std::string& what)
      : DomainError(what), parameter_(std::move(parameter)) {}
  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

/// A clan size in the population simulator would exceed the 2^62 cap.
class PopulationOverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// A rejection estimator accepted no paths.
class NoSampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Log-log slope fit could not be performed.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bpire
