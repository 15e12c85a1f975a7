#pragma once

#include <stdexcept>
#include <string>

namespace vessel {

/// Base class for everything thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside the domain of an operation (e.g. time outside the grid).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Dimension or grid mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be invertible is singular or too ill-conditioned.
class InvertibilityError : public Error {
 public:
  InvertibilityError(const std::string& what, int node = -1)
      : Error(what), node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

/// Adaptive integration failed (step size underflow or step budget exhausted).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Resolvent requested too close to the spectrum of the main operator.
class ResolventError : public Error {
 public:
  ResolventError(const std::string& what, double distance)
      : Error(what), distance_(distance) {}
  /// Estimated distance from lambda to the spectrum.
  double distance_to_spectrum() const { return distance_; }

 private:
  double distance_;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The lambda-free linkage constraints fail for supplied realization data.
class LinkageError : public Error {
 public:
  LinkageError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Contour quadrature failure (contour too close to the spectrum).
class ContourError : public Error {
 public:
  using Error::Error;
};

/// Laurent coefficients keep growing past the requested maximal order.
class OrderOverflowError : public Error {
 public:
  using Error::Error;
};

/// No similarity with acceptable intertwining residuals exists.
class NoSimilarityError : public Error {
 public:
  using Error::Error;
};

/// File parse or schema failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vessel
