#include "avgrl/chain.hpp"

#include "avgrl/error.hpp"
#include "avgrl/graph.hpp"
#include "avgrl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace avgrl {

PolicyChain policy_matrix(const InducedSmdp& smdp, const StationaryPolicy& policy) {
    if (policy.num_states() != smdp.num_states() || policy.num_actions() != smdp.num_options())
        throw Error(ErrorKind::ConfigInvalid, "policy shape does not match the model");
    const auto ns = static_cast<Eigen::Index>(smdp.num_states());
    PolicyChain chain{Eigen::MatrixXd::Zero(ns, ns), Eigen::VectorXd::Zero(ns), Eigen::VectorXd::Zero(ns)};
    for (std::size_t s = 0; s < smdp.num_states(); ++s) {
        const auto row = static_cast<Eigen::Index>(s);
        for (std::size_t o = 0; o < smdp.num_options(); ++o) {
            const double p = policy(s, o);
            if (p == 0.0) continue;
            const auto i = static_cast<Eigen::Index>(smdp.pair(s, o));
            chain.transition.row(row) += p * smdp.kernel().row(i);
            chain.reward(row) += p * smdp.exp_reward()(i);
            chain.length(row) += p * smdp.exp_length()(i);
        }
    }
    return chain;
}

ChainDecomposition decompose(const Eigen::MatrixXd& transition) {
    const Eigen::Index n = transition.rows();
    if (n == 0 || transition.cols() != n) throw Error(ErrorKind::ConfigInvalid, "transition matrix must be square");
    for (Eigen::Index i = 0; i < n; ++i)
        if ((transition.row(i).array() < 0.0).any() || std::abs(transition.row(i).sum() - 1.0) > 1e-9)
            throw Error(ErrorKind::NonStochasticRow, "transition row " + std::to_string(i) + " is not a distribution");

    const auto un = static_cast<std::size_t>(n);
    Adjacency graph(un);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (transition(i, j) > 0.0) graph[static_cast<std::size_t>(i)].push_back(static_cast<std::size_t>(j));
    const auto comp = strongly_connected_components(graph);
    const std::size_t ncomp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;

    std::vector<bool> closed(ncomp, true);
    for (std::size_t v = 0; v < un; ++v)
        for (std::size_t w : graph[v])
            if (comp[w] != comp[v]) closed[comp[v]] = false;

    ChainDecomposition out;
    out.transition = transition;
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> class_of(ncomp, kNone);
    for (std::size_t v = 0; v < un; ++v) {
        if (!closed[comp[v]]) {
            out.transient.push_back(v);
            continue;
        }
        if (class_of[comp[v]] == kNone) {
            class_of[comp[v]] = out.classes.size();
            out.classes.emplace_back();
        }
        out.classes[class_of[comp[v]]].push_back(v);
    }

    out.limiting = Eigen::MatrixXd::Zero(n, n);
    for (const auto& members : out.classes) {
        const auto k = static_cast<Eigen::Index>(members.size());
        Eigen::VectorXd pi(k);
        if (k == 1) {
            pi(0) = 1.0;
        } else {
            // pi (I - P_C) = 0 with the last balance equation replaced by sum(pi) = 1
            Eigen::MatrixXd a(k, k);
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = 0; j < k; ++j)
                    a(i, j) = (i == j ? 1.0 : 0.0) - transition(static_cast<Eigen::Index>(members[static_cast<std::size_t>(j)]),
                                                                static_cast<Eigen::Index>(members[static_cast<std::size_t>(i)]));
            a.row(k - 1).setOnes();
            Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
            b(k - 1) = 1.0;
            pi = guarded_solve(a, b, ErrorKind::SingularSolve, "stationary distribution");
        }
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < k; ++j)
                out.limiting(static_cast<Eigen::Index>(members[static_cast<std::size_t>(i)]),
                             static_cast<Eigen::Index>(members[static_cast<std::size_t>(j)])) = pi(j);
        out.stationary.push_back(std::move(pi));
    }

    if (!out.transient.empty()) {
        const auto nt = static_cast<Eigen::Index>(out.transient.size());
        const auto nc = static_cast<Eigen::Index>(out.classes.size());
        Eigen::MatrixXd absorb(nt, nc);
        if (nc == 1) {
            absorb.setOnes();
        } else {
            Eigen::MatrixXd system = Eigen::MatrixXd::Identity(nt, nt);
            Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nt, nc);
            std::vector<Eigen::Index> tpos(un, -1);
            for (Eigen::Index t = 0; t < nt; ++t) tpos[out.transient[static_cast<std::size_t>(t)]] = t;
            for (Eigen::Index t = 0; t < nt; ++t) {
                const auto s = static_cast<Eigen::Index>(out.transient[static_cast<std::size_t>(t)]);
                for (Eigen::Index j = 0; j < n; ++j) {
                    const double p = transition(s, j);
                    if (p == 0.0) continue;
                    const auto uj = static_cast<std::size_t>(j);
                    if (tpos[uj] >= 0)
                        system(t, tpos[uj]) -= p;
                    else
                        rhs(t, static_cast<Eigen::Index>(class_of[comp[uj]])) += p;
                }
            }
            absorb = guarded_solve(system, rhs, ErrorKind::SingularSolve, "absorption probabilities");
        }
        for (Eigen::Index t = 0; t < nt; ++t)
            for (Eigen::Index c = 0; c < nc; ++c) {
                const auto& members = out.classes[static_cast<std::size_t>(c)];
                for (std::size_t j = 0; j < members.size(); ++j)
                    out.limiting(static_cast<Eigen::Index>(out.transient[static_cast<std::size_t>(t)]),
                                 static_cast<Eigen::Index>(members[j])) =
                        absorb(t, c) * out.stationary[static_cast<std::size_t>(c)](static_cast<Eigen::Index>(j));
            }
    }

    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    out.fundamental = guarded_inverse(eye - transition + out.limiting, ErrorKind::SingularSolve, "fundamental matrix");
    return out;
}

Eigen::VectorXd reward_rate(const InducedSmdp& smdp, const StationaryPolicy& policy) {
    const PolicyChain chain = policy_matrix(smdp, policy);
    const ChainDecomposition dec = decompose(chain.transition);
    return (dec.limiting * chain.reward).cwiseQuotient(dec.limiting * chain.length);
}

SpanBound span_bound_check(const InducedSmdp& smdp, const QTable& q) {
    const auto ns = smdp.num_states();
    Eigen::VectorXd v(static_cast<Eigen::Index>(ns));
    for (std::size_t s = 0; s < ns; ++s) v(static_cast<Eigen::Index>(s)) = q.row_max(s);
    const Eigen::VectorXd next = smdp.kernel() * v;
    SpanBound bound{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < smdp.num_pairs(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double normalized = (smdp.exp_reward()(ii) + next(ii) - q[i]) / smdp.exp_length()(ii);
        bound.lower = std::min(bound.lower, normalized);
        bound.upper = std::max(bound.upper, normalized);
    }
    return bound;
}

} // namespace avgrl
