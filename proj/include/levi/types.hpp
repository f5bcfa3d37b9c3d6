#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace levi {

using Complex = std::complex<double>;

/// A point of C^n, one complex entry per coordinate.
using Point = Eigen::VectorXcd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  /// 1-based character position.
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class NonRealValue : public Error {
 public:
  using Error::Error;
};

class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(const std::string& message, double min_eigenvalue)
      : Error(message + " (smallest eigenvalue " + std::to_string(min_eigenvalue) + ")"),
        min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

class DegenerateBoundaryPoint : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class FrameMismatch : public Error {
 public:
  using Error::Error;
};

class SamplingFailure : public Error {
 public:
  SamplingFailure(const std::string& message, std::size_t successes)
      : Error(message), successes_(successes) {}
  std::size_t successes() const { return successes_; }

 private:
  std::size_t successes_;
};

class SupportOverflow : public Error {
 public:
  using Error::Error;
};

/// Builds a point from interleaved real coordinates (x1, y1, x2, y2, ...).
Point point_from_reals(const std::vector<double>& xy);

}  // namespace levi
