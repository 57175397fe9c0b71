#pragma once

#include <stdexcept>
#include <string>

namespace declip {

// Base class for all declip errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector/matrix shapes do not agree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// An off-diagonal row sum exceeds 1, so no nonnegative diagonal completes the row.
class NegativeDiagonal : public Error {
 public:
  using Error::Error;
};

// The communication graph induced by positive weights is not strongly connected.
class NotConnected : public Error {
 public:
  using Error::Error;
};

// The same undirected edge was listed more than once.
class DuplicateEdge : public Error {
 public:
  using Error::Error;
};

// No certified gradient bound is available for the instance.
class Unbounded : public Error {
 public:
  using Error::Error;
};

// An iterative solver exhausted its iteration budget.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// The requested moment order is not finite for the noise distribution.
class MomentDiverges : public Error {
 public:
  using Error::Error;
};

// A step-size/clipping schedule violates its structural requirements.
class ScheduleInvalid : public Error {
 public:
  using Error::Error;
};

// Config file could not be parsed; `where()` addresses the offending field.
class ParseError : public Error {
 public:
  ParseError(std::string location, const std::string& what)
      : Error(location.empty() ? what : location + ": " + what),
        location_(std::move(location)) {}

  const std::string& where() const noexcept { return location_; }

 private:
  std::string location_;
};

// Sweep over a parameter the experiment layer does not know.
class UnknownParameter : public Error {
 public:
  using Error::Error;
};

}  // namespace declip
