#pragma once

#include "avgrl/error.hpp"

#include <Eigen/Dense>

#include <string>

namespace avgrl {

/// Reciprocal-condition floor for every linear solve (condition number 1e10).
inline constexpr double kMinReciprocalCondition = 1e-10;

/// Solves A X = B, rejecting systems whose estimated reciprocal condition
/// number falls below kMinReciprocalCondition.
Eigen::MatrixXd guarded_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, ErrorKind on_failure,
                              const std::string& what);

Eigen::MatrixXd guarded_inverse(const Eigen::MatrixXd& a, ErrorKind on_failure, const std::string& what);

} // namespace avgrl
