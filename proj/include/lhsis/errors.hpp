#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace lhsis {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed coefficient expression. `offset` is the byte offset into the source.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A formula left its mathematical domain: ln of a non-positive number,
/// overflow, a singular chart point, a deformed solution past its window.
class DomainError : public Error {
 public:
  DomainError(const std::string& message, double t)
      : Error(message), t_(t) {}

  /// Time at which the violation occurred (NaN when time plays no role).
  double time() const noexcept { return t_; }

 private:
  double t_;
};

/// State on the singular locus of the (q,p) <-> (x,y) map.
class SingularLocusError : public DomainError {
 public:
  SingularLocusError(const std::string& message, double first, double second)
      : DomainError(message, std::numeric_limits<double>::quiet_NaN()),
        first_(first), second_(second) {}

  double first() const noexcept { return first_; }
  double second() const noexcept { return second_; }

 private:
  double first_;
  double second_;
};

/// Deformed solution evaluated outside 1 - z c1 e^Theta(t) > 0.
class ValidityWindowError : public DomainError {
 public:
  ValidityWindowError(const std::string& message, double t, double t_max)
      : DomainError(message, t), t_max_(t_max) {}

  double t_max() const noexcept { return t_max_; }

 private:
  double t_max_;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& message, double lo, double hi)
      : Error(message), lo_(lo), hi_(hi) {}

  /// Offending subinterval (a single point when lo == hi).
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

class OdeError : public Error {
 public:
  enum class Kind { StepSizeUnderflow, MaxStepsExceeded, NonFiniteRhs };

  OdeError(Kind kind, const std::string& message, double last_good_time)
      : Error(message), kind_(kind), last_good_time_(last_good_time) {}

  Kind kind() const noexcept { return kind_; }
  double last_good_time() const noexcept { return last_good_time_; }

 private:
  Kind kind_;
  double last_good_time_;
};

/// Invalid scenario file or command-line input.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

}  // namespace lhsis
