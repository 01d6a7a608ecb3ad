#pragma once

#include <stdexcept>
#include <string>

namespace vmlab {

// Base for every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of an evaluation (t < 0, t > t_max, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

// Model-definition document does not match the schema.
class SchemaError : public Error {
public:
  using Error::Error;
};

// Profile data violates f(0)=0, f>0, f'(0)=1.
class AdmissibilityError : public Error {
public:
  using Error::Error;
};

// Caller violated an operation's precondition.
class PreconditionError : public Error {
public:
  using Error::Error;
};

// Adaptive integration could not proceed (step size underflow, step budget).
class IntegrationError : public Error {
public:
  using Error::Error;
};

// Shooting did not converge; carries the best bracket found.
class NoConvergenceError : public Error {
public:
  NoConvergenceError(const std::string& what, double lower, double upper)
      : Error(what), lower_(lower), upper_(upper) {}
  double lower() const { return lower_; }
  double upper() const { return upper_; }

private:
  double lower_;
  double upper_;
};

// Two paths that should share a start point do not.
class MismatchError : public Error {
public:
  using Error::Error;
};

// No comparison triangle with the requested sides exists on the model.
class DoesNotFitError : public Error {
public:
  using Error::Error;
};

class DegenerateError : public Error {
public:
  using Error::Error;
};

// Numerical consistency check failed (e.g. conjugate point on the pole segment).
class IoError : public Error {
public:
  using Error::Error;
};

class ModelInconsistencyError : public Error {
public:
  using Error::Error;
};

} // namespace vmlab
