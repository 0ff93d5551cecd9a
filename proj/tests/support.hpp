#pragma once

// Generators and independent reference computations shared by the test suites.

#include "avgrl/mdp.hpp"
#include "avgrl/options.hpp"
#include "avgrl/qtable.hpp"
#include "avgrl/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace avgrl::testing {

/// Random row-stochastic matrix with roughly `density` of entries nonzero
/// (at least one per row).
inline Eigen::MatrixXd random_stochastic(std::size_t n, Rng& rng, double density = 0.5) {
    const auto m = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j)
            if (rng.uniform() < density) p(i, j) = rng.uniform(0.05, 1.0);
        if (p.row(i).sum() == 0.0) p(i, static_cast<Eigen::Index>(rng.next() % n)) = 1.0;
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

/// Random MDP with sparse supports and rewards in [-1, 1] (or zero).
inline TabularMdp random_mdp(std::size_t ns, std::size_t na, Rng& rng, bool zero_rewards = false) {
    RawModel raw;
    for (std::size_t s = 0; s < ns; ++s) raw.states.push_back("s" + std::to_string(s));
    for (std::size_t a = 0; a < na; ++a) raw.actions.push_back("a" + std::to_string(a));
    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t a = 0; a < na; ++a) {
            std::vector<double> w(ns, 0.0);
            const std::size_t k = 1 + rng.next() % 2;
            for (std::size_t i = 0; i < k; ++i) w[rng.next() % ns] += rng.uniform(0.1, 1.0);
            double total = 0.0;
            for (double v : w) total += v;
            double assigned = 0.0;
            std::size_t last = 0;
            for (std::size_t t = 0; t < ns; ++t)
                if (w[t] > 0.0) last = t;
            for (std::size_t t = 0; t < ns; ++t) {
                if (w[t] == 0.0) continue;
                const double p = t == last ? 1.0 - assigned : w[t] / total;
                assigned += p;
                raw.transitions.push_back({s, a, t, zero_rewards ? 0.0 : rng.uniform(-1.0, 1.0), p});
            }
        }
    return validate_mdp(raw);
}

/// Random weakly communicating (or communicating) MDP, by rejection.
inline TabularMdp random_weakly_communicating(std::size_t max_states, std::size_t max_actions, Rng& rng,
                                              bool zero_rewards = false) {
    while (true) {
        const std::size_t ns = 1 + rng.next() % max_states;
        const std::size_t na = 1 + rng.next() % max_actions;
        TabularMdp m = random_mdp(ns, na, rng, zero_rewards);
        if (classify_structure(m).tag != StructureTag::NotWeaklyCommunicating) return m;
    }
}

/// Random proper option: random policy rows, termination in [0.1, 1].
inline OptionSpec random_option(const TabularMdp& model, Rng& rng, const std::string& name) {
    const auto ns = static_cast<Eigen::Index>(model.num_states());
    const auto na = static_cast<Eigen::Index>(model.num_actions());
    OptionSpec o{name, Eigen::MatrixXd::Zero(ns, na), Eigen::VectorXd::Zero(ns)};
    for (Eigen::Index s = 0; s < ns; ++s) {
        for (Eigen::Index a = 0; a < na; ++a) o.policy(s, a) = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.1, 1.0);
        if (o.policy.row(s).sum() == 0.0) o.policy(s, 0) = 1.0;
        o.policy.row(s) /= o.policy.row(s).sum();
        o.termination(s) = rng.uniform() < 0.3 ? 1.0 : rng.uniform(0.1, 1.0);
    }
    return o;
}

/// Cesaro average (1/N) sum_{k<N} P^k: an independent, slowly converging
/// reference for the structural limiting matrix.
inline Eigen::MatrixXd cesaro_average(const Eigen::MatrixXd& p, int terms) {
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(p.rows(), p.cols());
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(p.rows(), p.cols());
    for (int k = 0; k < terms; ++k) {
        total += power;
        power = power * p;
    }
    return total / terms;
}

inline QTable table(std::size_t ns, std::size_t na, std::vector<double> values) {
    return QTable(ns, na, std::move(values));
}

} // namespace avgrl::testing
