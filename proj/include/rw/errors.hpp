#pragma once

#include <stdexcept>
#include <string>

namespace rw {

// Base of every error raised by the workbench. Callers that only want to
// report can catch this; the CLI maps it to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class UnknownName : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class NotNormalized : public Error {
 public:
  using Error::Error;
};

class NegativeMu : public Error {
 public:
  using Error::Error;
};

class NonPositiveField : public Error {
 public:
  using Error::Error;
};

class NonContracting : public Error {
 public:
  using Error::Error;
};

class EndpointNonzero : public Error {
 public:
  using Error::Error;
};

class FlagsUnverified : public Error {
 public:
  using Error::Error;
};

// Raised when a geodesic leaves the chart; carries the arclength reached.
class LeftDomain : public Error {
 public:
  LeftDomain(const std::string& what, double exit_arclength)
      : Error(what), exit_arclength_(exit_arclength) {}
  double exit_arclength() const noexcept { return exit_arclength_; }

 private:
  double exit_arclength_;
};

// Raised when the Jacobi-field determinant stops being positive.
class ConjugatePoint : public Error {
 public:
  ConjugatePoint(const std::string& what, double radius)
      : Error(what), radius_(radius) {}
  double radius() const noexcept { return radius_; }

 private:
  double radius_;
};

}  // namespace rw
