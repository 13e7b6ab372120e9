#pragma once

#include <stdexcept>
#include <string>

namespace spectra {

/// Bad input: violated precondition or malformed configuration (CLI exit code 2).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation ran but did not produce a trustworthy number (CLI exit code 1).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The PL ratio V / V'^2 is unbounded on the requested window.
class PlDivergence : public NumericalError {
 public:
  PlDivergence(const std::string& what, double witness)
      : NumericalError(what), witness_(witness) {}
  double witness() const { return witness_; }

 private:
  double witness_;
};

}  // namespace spectra
