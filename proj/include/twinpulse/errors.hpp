#pragma once

#include <stdexcept>
#include <string>

namespace twinpulse {

/// Invalid argument or precondition violation supplied by the caller.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A propagator left SU(2) by more than the rejection tolerance.
class UnitarityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integration failure: non-finite Hamiltonian sample or a step size too large to stay unitary.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested evaluation route does not exist for the given input.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace twinpulse
