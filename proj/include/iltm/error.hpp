#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iltm {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a special function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Edge deletion or construction produced a disconnected multigraph.
class DisconnectedGraph : public Error {
 public:
  using Error::Error;
};

/// Evaluation point lies on or beyond a pole of the generalized gamma function.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// Adaptive integration ran out of budget; carries the best estimate reached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_value, double best_error)
      : Error(what), best_value_(best_value), best_error_(best_error) {}

  double best_value() const noexcept { return best_value_; }
  double best_error() const noexcept { return best_error_; }

 private:
  double best_value_;
  double best_error_;
};

/// Monte Carlo integrand returned non-finite values.
class TaintedEstimate : public Error {
 public:
  TaintedEstimate(const std::string& what, std::size_t rejected)
      : Error(what), rejected_(rejected) {}

  std::size_t rejected() const noexcept { return rejected_; }

 private:
  std::size_t rejected_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A moment assembly was requested without all of its inputs.
class IncompleteConstants : public Error {
 public:
  using Error::Error;
};

}  // namespace iltm
