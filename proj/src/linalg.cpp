#include "avgrl/linalg.hpp"

namespace avgrl {

Eigen::MatrixXd guarded_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, ErrorKind on_failure,
                              const std::string& what) {
    if (a.rows() == 0) return Eigen::MatrixXd(0, b.cols());
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond >= kMinReciprocalCondition))
        throw Error(on_failure, what + " (reciprocal condition " + std::to_string(rcond) + ")");
    Eigen::MatrixXd x = lu.solve(b);
    if (!x.allFinite()) throw Error(on_failure, what + " (non-finite solution)");
    return x;
}

Eigen::MatrixXd guarded_inverse(const Eigen::MatrixXd& a, ErrorKind on_failure, const std::string& what) {
    return guarded_solve(a, Eigen::MatrixXd::Identity(a.rows(), a.cols()), on_failure, what);
}

} // namespace avgrl
