#pragma once

#include <stdexcept>
#include <string>

namespace tdlhf {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Argument outside the documented domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

// A numerical procedure (quadrature, SCF, time stepper) failed to reach its
// tolerance. `achieved` carries the best error/residual estimate.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string &what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

private:
  double achieved_;
};

// The discretized exchange equation has more than the constant null
// direction, usually because the orbitals are no longer orthonormal.
class SingularSystemError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace tdlhf
