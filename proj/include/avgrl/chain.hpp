#pragma once

#include "avgrl/mdp.hpp"
#include "avgrl/options.hpp"
#include "avgrl/qtable.hpp"

#include <Eigen/Dense>

#include <vector>

namespace avgrl {

/// Policy-mixed one-step quantities of an SMDP under a (meta-)policy.
struct PolicyChain {
    Eigen::MatrixXd transition; // P_pi
    Eigen::VectorXd reward;     // r_pi
    Eigen::VectorXd length;     // l_pi
};

PolicyChain policy_matrix(const InducedSmdp& smdp, const StationaryPolicy& policy);

/**
 * Structural decomposition of a finite Markov chain.
 *
 * Invariants: limiting rows sum to 1; limiting * transition =
 * transition * limiting = limiting * limiting = limiting; and
 * fundamental * (I - transition + limiting) = I.
 */
struct ChainDecomposition {
    Eigen::MatrixXd transition;
    std::vector<std::vector<std::size_t>> classes; // recurrent classes, ordered by smallest state
    std::vector<std::size_t> transient;
    std::vector<Eigen::VectorXd> stationary; // per class, indexed like classes[c]
    Eigen::MatrixXd limiting;                // Cesaro limit P^inf
    Eigen::MatrixXd fundamental;             // Z = (I - P + P^inf)^-1
};

/// Recurrent classes are the closed SCCs of the positive-support graph;
/// P^inf is assembled from stationary rows and absorption probabilities,
/// so periodic chains are handled exactly. Throws SingularSolve.
ChainDecomposition decompose(const Eigen::MatrixXd& transition);

/// Per-state reward rate (P^inf r_pi)(s) / (P^inf l_pi)(s).
Eigen::VectorXd reward_rate(const InducedSmdp& smdp, const StationaryPolicy& policy);

struct SpanBound {
    double lower;
    double upper;
};

/// min and max over pairs of ((T q - q) / l), T the optimality operator with
/// zero rate. Brackets the rate of any greedy policy and the optimal rate.
SpanBound span_bound_check(const InducedSmdp& smdp, const QTable& q);

} // namespace avgrl
