#pragma once

#include <Eigen/Dense>

namespace avgrl {

struct LpSolution {
    double value;
    Eigen::VectorXd x;
};

/// maximize c'x subject to A x = b, x >= 0, by two-phase dense simplex with
/// Bland's rule. Redundant equality rows are tolerated. Throws
/// PreconditionViolation when infeasible or unbounded.
LpSolution maximize_standard_form(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

} // namespace avgrl
