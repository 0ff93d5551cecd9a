#include "avgrl/lp.hpp"

#include "avgrl/error.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace avgrl {

namespace {

constexpr double kPivotEps = 1e-11;

// Tableau rows 0..m-1 are constraints, row m is the objective (reduced
// costs, to be made nonnegative for a maximization). Last column is the rhs.
struct Tableau {
    Eigen::MatrixXd t;
    std::vector<Eigen::Index> basis;

    Eigen::Index rows() const { return t.rows() - 1; }
    Eigen::Index rhs() const { return t.cols() - 1; }

    void pivot(Eigen::Index r, Eigen::Index col) {
        t.row(r) /= t(r, col);
        for (Eigen::Index i = 0; i < t.rows(); ++i)
            if (i != r && t(i, col) != 0.0) t.row(i) -= t(i, col) * t.row(r);
        basis[static_cast<std::size_t>(r)] = col;
    }

    // Bland's rule over columns [0, ncols); returns false if unbounded.
    bool run(Eigen::Index ncols) {
        while (true) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < ncols; ++j)
                if (t(rows(), j) < -kPivotEps) {
                    enter = j;
                    break;
                }
            if (enter < 0) return true;
            Eigen::Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < rows(); ++i) {
                if (t(i, enter) <= kPivotEps) continue;
                const double ratio = t(i, rhs()) / t(i, enter);
                if (ratio < best - 1e-14 ||
                    (std::abs(ratio - best) <= 1e-14 && leave >= 0 &&
                     basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    }
};

} // namespace

LpSolution maximize_standard_form(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    if (c.size() != n || b.size() != m) throw Error(ErrorKind::ConfigInvalid, "LP dimensions disagree");

    // phase 1: artificials on every row, rhs made nonnegative
    Tableau tab{Eigen::MatrixXd::Zero(m + 1, n + m + 1), std::vector<Eigen::Index>(static_cast<std::size_t>(m))};
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sign = b(i) < 0.0 ? -1.0 : 1.0;
        tab.t.row(i).head(n) = sign * a.row(i);
        tab.t(i, n + i) = 1.0;
        tab.t(i, n + m) = sign * b(i);
        tab.basis[static_cast<std::size_t>(i)] = n + i;
    }
    for (Eigen::Index i = 0; i < m; ++i) tab.t.row(m) -= tab.t.row(i);
    for (Eigen::Index i = 0; i < m; ++i) tab.t(m, n + i) = 0.0;
    tab.run(n + m);
    if (-tab.t(m, n + m) > 1e-8) throw Error(ErrorKind::PreconditionViolation, "LP is infeasible");

    // drive artificials out of the basis where possible; rows that cannot be
    // pivoted are redundant and are dropped
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (tab.basis[static_cast<std::size_t>(i)] < n) {
            keep.push_back(i);
            continue;
        }
        Eigen::Index col = -1;
        for (Eigen::Index j = 0; j < n; ++j)
            if (std::abs(tab.t(i, j)) > 1e-9) {
                col = j;
                break;
            }
        if (col >= 0) {
            tab.pivot(i, col);
            keep.push_back(i);
        }
    }

    // phase 2 on original columns only
    const auto mk = static_cast<Eigen::Index>(keep.size());
    Tableau two{Eigen::MatrixXd::Zero(mk + 1, n + 1), std::vector<Eigen::Index>(static_cast<std::size_t>(mk))};
    for (Eigen::Index k = 0; k < mk; ++k) {
        const Eigen::Index i = keep[static_cast<std::size_t>(k)];
        two.t.row(k).head(n) = tab.t.row(i).head(n);
        two.t(k, n) = tab.t(i, n + m);
        two.basis[static_cast<std::size_t>(k)] = tab.basis[static_cast<std::size_t>(i)];
    }
    two.t.row(mk).head(n) = -c.transpose();
    for (Eigen::Index k = 0; k < mk; ++k) {
        const Eigen::Index col = two.basis[static_cast<std::size_t>(k)];
        const double coef = two.t(mk, col);
        if (coef != 0.0) two.t.row(mk) -= coef * two.t.row(k);
    }
    if (!two.run(n)) throw Error(ErrorKind::PreconditionViolation, "LP is unbounded");

    LpSolution sol{two.t(mk, n), Eigen::VectorXd::Zero(n)};
    for (Eigen::Index k = 0; k < mk; ++k) sol.x(two.basis[static_cast<std::size_t>(k)]) = two.t(k, n);
    return sol;
}

} // namespace avgrl
