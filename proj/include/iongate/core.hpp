#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace iongate {

using cplx = std::complex<double>;

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CMat = Mat<cplx>;
using CVec = Vec<cplx>;
using RMat = Mat<double>;
using RVec = Vec<double>;
using Operator = Eigen::SparseMatrix<cplx>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kI{0.0, 1.0};

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IntegratorFailure : public Error {
 public:
  IntegratorFailure(const std::string& what, double time)
      : Error(what + " at t=" + std::to_string(time)), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double time, double top_population)
      : Error(what), time_(time), top_population_(top_population) {}
  double time() const { return time_; }
  double top_population() const { return top_population_; }

 private:
  double time_;
  double top_population_;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

// Throws ConfigError listing every entry when diagnostics is non-empty.
void throw_if_invalid(const std::vector<std::string>& diagnostics);

// Writes a one-line warning to stderr.
void warn(const std::string& message);

}  // namespace iongate
