#pragma once

#include "avgrl/mdp.hpp"
#include "avgrl/options.hpp"
#include "avgrl/qtable.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace avgrl {

/// Deterministic-policy count above which r_* is computed by linear programming.
inline constexpr double kEnumerationBudget = 1e6;

enum class RateMethod { Auto, Enumerate, LinearProgram };

/// Optimal reward rate of a communicating or weakly communicating SMDP.
/// Throws NotWeaklyCommunicating; Enumerate throws EnumerationOverflow when
/// the policy count exceeds kEnumerationBudget (Auto switches to the LP).
double optimal_reward_rate(const InducedSmdp& smdp, RateMethod method = RateMethod::Auto);
double optimal_reward_rate(const TabularMdp& model, RateMethod method = RateMethod::Auto);

struct Residual {
    double sup_norm;
    QTable per_pair;
};

/// r(s,o) - r_bar l(s,o) + sum_s' P(s'|s,o) max_o' q(s',o') - q(s,o).
Residual bellman_residual(const InducedSmdp& smdp, const QTable& q, double r_bar);

/// Intra-option residual computed from base one-step dynamics:
/// sum_a pi(a|s,o) sum_{s',r} p(s',r|s,a) (r - r_bar + u(s',o)) - q(s,o),
/// u(s',o) = (1 - beta(s',o)) q(s',o) + beta(s',o) max_o' q(s',o').
Residual intra_option_residual(const TabularMdp& model, const std::vector<OptionSpec>& options, const QTable& q,
                               double r_bar);

struct OptimalityReport {
    double r_star;
    QTable witness_q;
    double residual_sup;
    double f_value;
    std::uint64_t iterations;
};

struct SolveSettings {
    double tol = 1e-9;
    std::uint64_t max_iterations = 1'000'000;
    /// Weight of the new iterate in each relative value iteration sweep.
    /// Values below 1 make every pair's update aperiodic.
    double damping = 0.5;
    std::optional<QTable> initial;
};

/// One member of the solution set pinned by f: relative value iteration on
/// the length-normalized operator, then a shift so that f(witness) = r_*.
/// Throws NotWeaklyCommunicating or NoConvergence.
OptimalityReport solve_q(const InducedSmdp& smdp, const ReferenceFunction& f, const SolveSettings& settings = {});

/// Same, iterating the intra-option optimality operator on base dynamics.
OptimalityReport solve_q_intra(const TabularMdp& model, const std::vector<OptionSpec>& options,
                               const ReferenceFunction& f, const SolveSettings& settings = {});

/// Runs solve_q from `trials` random starts (entries uniform in [-10, 10])
/// and reports whether every witness is the zero table (sup norm <= 1e-6).
/// Requires all rewards to be zero (PreconditionViolation otherwise).
bool zero_reward_uniqueness_check(const InducedSmdp& smdp, const ReferenceFunction& f, std::size_t trials,
                                  std::uint64_t seed);

struct MidpointCheck {
    std::size_t first;
    std::size_t second;
    double residual_sup;
};

struct ProbeReport {
    double r_star;
    std::vector<QTable> members;
    std::vector<double> member_residuals;
    std::vector<MidpointCheck> midpoints;
};

/// Sup distance below which two probe members count as the same point.
inline constexpr double kDistinctMemberThreshold = 1e-4;

ProbeReport solution_set_probe(const InducedSmdp& smdp, const ReferenceFunction& f, std::size_t samples,
                               std::uint64_t seed);

} // namespace avgrl
