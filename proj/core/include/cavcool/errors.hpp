#pragma once

#include <stdexcept>
#include <string>

namespace cavcool {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range physical input.
class ParamError : public Error {
 public:
  using Error::Error;
};

// A propagator denominator f(zeta) vanished; the caller is probing a dressed
// resonance where Lamb-Dicke perturbation theory diverges.
class PoleError : public Error {
 public:
  PoleError(const std::string& factor, const std::string& what)
      : Error(what), factor_(factor) {}
  const std::string& factor() const noexcept { return factor_; }

 private:
  std::string factor_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Gamma <= 0: no stationary phonon distribution exists.
class HeatingError : public Error {
 public:
  using Error::Error;
};

class NoRootError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace cavcool
