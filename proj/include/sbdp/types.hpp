#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace sbdp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Error for invalid model or configuration data (dimension mismatch,
/// malformed graph, bad parameter values, unknown scenario keys, ...).
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Error raised when an inner solver fails (max iterations, unbounded
/// subproblem, singular system, diverging outer iteration).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sbdp
