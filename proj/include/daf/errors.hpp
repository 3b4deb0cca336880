#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace daf {

// Raised when an argument lies outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised for malformed inputs (bad lengths, inconsistent sizes, invalid configs).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to reach its tolerance. The best estimate so far
// and the last error indicator are carried along for diagnostics.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string what, double estimate, double error_estimate)
      : std::runtime_error(std::move(what)),
        estimate_(estimate),
        error_estimate_(error_estimate) {}

  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

}  // namespace daf
