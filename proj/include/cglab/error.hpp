#pragma once

#include <stdexcept>
#include <string>

namespace cglab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: dimension mismatch, malformed option strings, NaN input.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration; `field` names the offending entry.
class ConfigError : public UsageError {
 public:
  ConfigError(const std::string& field, const std::string& what) : UsageError(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class ArithmeticError : public Error {
 public:
  using Error::Error;
};

/// A quadratic form or Cholesky pivot came out nonpositive.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// (p, Ap) <= 0 inside a CG step.
class BreakdownError : public Error {
 public:
  BreakdownError(const std::string& what, double pAp, long iteration)
      : Error(what), pAp_(pAp), iteration_(iteration) {}

  double pAp() const { return pAp_; }
  long iteration() const { return iteration_; }

 private:
  double pAp_;
  long iteration_;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// Eigenvalue iteration hit its cap; carries the best estimates it had.
class EstimationFailed : public Error {
 public:
  EstimationFailed(const std::string& what, double lambda_min, double lambda_max)
      : Error(what), lambda_min_(lambda_min), lambda_max_(lambda_max) {}

  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }

 private:
  double lambda_min_;
  double lambda_max_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line) : Error(what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Analysis asked for something the run cannot provide (e.g. no reference solution).
class Unavailable : public Error {
 public:
  using Error::Error;
};

class NotStagnated : public Error {
 public:
  using Error::Error;
};

}  // namespace cglab
