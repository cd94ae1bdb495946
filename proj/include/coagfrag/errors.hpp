#pragma once

#include <stdexcept>
#include <string>

namespace coagfrag {

/// Invalid user input: bad grid bounds, out-of-range kernel parameters,
/// inconsistent truncation. Maps to CLI exit status 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kernel evaluated outside its domain (non-positive volumes).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Blow-up, step-size underflow, quadrature failure, oversized oracle input.
/// Maps to CLI exit status 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coagfrag
