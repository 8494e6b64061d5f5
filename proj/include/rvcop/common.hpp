#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace rvcop {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Malformed or inconsistent input data (files, misaligned series, bad sizes).
/// The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: non-SPD input where SPD is required, optimizer or
/// root-finder non-convergence, singular designs. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rvcop
