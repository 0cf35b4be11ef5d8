#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace homeo {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise malformed input values.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain (non-SPD, singular, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Result would overflow double range (matrix exponential of large eigenvalues).
class RangeError : public Error {
 public:
  using Error::Error;
};

class DegenerateMaterial : public Error {
 public:
  using Error::Error;
};

/// Newton iteration for the growth multiplier did not reach tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

/// A simulation step failed; carries the index of the failing step.
class StepFailure : public Error {
 public:
  StepFailure(std::size_t index, const std::string& cause)
      : Error("step " + std::to_string(index) + ": " + cause), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Gradient evaluation produced a non-finite component.
class NumericalFailure : public Error {
 public:
  NumericalFailure(std::size_t component, const std::string& what)
      : Error(what), component_(component) {}
  std::size_t component() const { return component_; }

 private:
  std::size_t component_;
};

class TrainingAborted : public Error {
 public:
  TrainingAborted(std::size_t epoch, const std::string& cause)
      : Error("training aborted at epoch " + std::to_string(epoch) + ": " + cause), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

/// File or document parse failure; line is 1-based, 0 when not line oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace homeo
