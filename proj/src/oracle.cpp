#include "avgrl/oracle.hpp"

#include "avgrl/chain.hpp"
#include "avgrl/error.hpp"
#include "avgrl/lp.hpp"
#include "avgrl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace avgrl {

namespace {

void require_weakly_communicating(const InducedSmdp& smdp) {
    if (classify_structure(smdp).tag == StructureTag::NotWeaklyCommunicating)
        throw Error(ErrorKind::NotWeaklyCommunicating, "model is not weakly communicating");
}

double enumerate_rate(const InducedSmdp& smdp) {
    const std::size_t ns = smdp.num_states();
    const std::size_t no = smdp.num_options();
    std::vector<std::size_t> choice(ns, 0);
    double best = -std::numeric_limits<double>::infinity();
    while (true) {
        const Eigen::VectorXd rate = reward_rate(smdp, StationaryPolicy::deterministic(no, choice));
        best = std::max(best, rate.maxCoeff());
        std::size_t s = 0;
        while (s < ns && ++choice[s] == no) choice[s++] = 0;
        if (s == ns) break;
    }
    return best;
}

// max sum r x  s.t.  balance at every state, sum l x = 1, x >= 0
double lp_rate(const InducedSmdp& smdp) {
    const auto ns = static_cast<Eigen::Index>(smdp.num_states());
    const auto np = static_cast<Eigen::Index>(smdp.num_pairs());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(ns + 1, np);
    for (Eigen::Index i = 0; i < np; ++i) {
        const Eigen::Index s = i / static_cast<Eigen::Index>(smdp.num_options());
        a(s, i) += 1.0;
        a.col(i).head(ns) -= smdp.kernel().row(i).transpose();
        a(ns, i) = smdp.exp_length()(i);
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(ns + 1);
    b(ns) = 1.0;
    return maximize_standard_form(smdp.exp_reward(), a, b).value;
}

} // namespace

double optimal_reward_rate(const InducedSmdp& smdp, RateMethod method) {
    require_weakly_communicating(smdp);
    const double count = std::pow(static_cast<double>(smdp.num_options()), static_cast<double>(smdp.num_states()));
    if (method == RateMethod::LinearProgram) return lp_rate(smdp);
    if (count > kEnumerationBudget) {
        if (method == RateMethod::Enumerate)
            throw Error(ErrorKind::EnumerationOverflow, "too many deterministic policies to enumerate");
        return lp_rate(smdp);
    }
    return enumerate_rate(smdp);
}

double optimal_reward_rate(const TabularMdp& model, RateMethod method) {
    return optimal_reward_rate(to_smdp(model), method);
}

Residual bellman_residual(const InducedSmdp& smdp, const QTable& q, double r_bar) {
    if (q.num_states() != smdp.num_states() || q.num_choices() != smdp.num_options())
        throw Error(ErrorKind::ConfigInvalid, "q table shape does not match the model");
    const auto ns = static_cast<Eigen::Index>(smdp.num_states());
    Eigen::VectorXd v(ns);
    for (Eigen::Index s = 0; s < ns; ++s) v(s) = q.row_max(static_cast<std::size_t>(s));
    Residual out{0.0, QTable(q.num_states(), q.num_choices())};
    for (std::size_t i = 0; i < smdp.num_pairs(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        double expected_next = 0.0;
        for (Eigen::Index s = 0; s < ns; ++s) {
            const double p = smdp.kernel()(ii, s);
            if (p != 0.0) expected_next += p * v(s);
        }
        out.per_pair[i] = smdp.exp_reward()(ii) - r_bar * smdp.exp_length()(ii) + expected_next - q[i];
        out.sup_norm = std::max(out.sup_norm, std::abs(out.per_pair[i]));
    }
    return out;
}

namespace {

// Right-hand side of the intra-option equation with zero rate, and the
// per-pair probability mass it integrates (1 per base step).
QTable intra_rhs(const TabularMdp& model, const std::vector<OptionSpec>& options, const QTable& q, double r_bar) {
    const std::size_t ns = model.num_states();
    const std::size_t no = options.size();
    QTable out(ns, no);
    for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t o = 0; o < no; ++o) {
            const auto& opt = options[o];
            double total = 0.0;
            for (std::size_t a = 0; a < model.num_actions(); ++a) {
                const double pi = opt.policy(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
                if (pi == 0.0) continue;
                double inner = 0.0;
                for (const auto& t : model.outcomes(s, a)) {
                    const double beta = opt.termination(static_cast<Eigen::Index>(t.next));
                    const double u = (1.0 - beta) * q(t.next, o) + beta * q.row_max(t.next);
                    inner += t.prob * (t.reward - r_bar + u);
                }
                total += pi * inner;
            }
            out(s, o) = total;
        }
    }
    return out;
}

void check_intra_inputs(const TabularMdp& model, const std::vector<OptionSpec>& options, const QTable& q) {
    if (options.empty()) throw Error(ErrorKind::EmptyModel, "option list is empty");
    for (const auto& o : options) validate_option(model, o);
    if (q.num_states() != model.num_states() || q.num_choices() != options.size())
        throw Error(ErrorKind::ConfigInvalid, "q table shape does not match the option set");
}

} // namespace

Residual intra_option_residual(const TabularMdp& model, const std::vector<OptionSpec>& options, const QTable& q,
                               double r_bar) {
    check_intra_inputs(model, options, q);
    Residual out{0.0, intra_rhs(model, options, q, r_bar)};
    for (std::size_t i = 0; i < q.size(); ++i) {
        out.per_pair[i] -= q[i];
        out.sup_norm = std::max(out.sup_norm, std::abs(out.per_pair[i]));
    }
    return out;
}

namespace {

// Shared relative value iteration loop. `normalized` fills d with the
// length-normalized zero-rate residual of q.
template <typename Normalized>
QTable relative_value_iteration(QTable q, const SolveSettings& settings, Normalized normalized,
                                std::uint64_t& iterations) {
    if (!(settings.damping > 0.0 && settings.damping <= 1.0))
        throw Error(ErrorKind::ConfigInvalid, "damping must lie in (0, 1]");
    const double target = settings.tol * 1e-2;
    QTable d(q.num_states(), q.num_choices());
    for (iterations = 0; iterations < settings.max_iterations; ++iterations) {
        normalized(q, d);
        const auto [lo, hi] = std::minmax_element(d.values().begin(), d.values().end());
        if (*hi - *lo < target) return q;
        const double anchor = d[0];
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += settings.damping * (d[i] - anchor);
        if (!q.all_finite()) throw Error(ErrorKind::NoConvergence, "relative value iteration diverged");
    }
    throw Error(ErrorKind::NoConvergence,
                "relative value iteration did not converge in " + std::to_string(settings.max_iterations) + " sweeps");
}

QTable pin(QTable q, const ReferenceFunction& f, double r_star) {
    const double c = (r_star - f(q)) / f.u();
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += c;
    return q;
}

QTable initial_table(const SolveSettings& settings, std::size_t ns, std::size_t no) {
    if (!settings.initial) return QTable(ns, no);
    if (settings.initial->num_states() != ns || settings.initial->num_choices() != no)
        throw Error(ErrorKind::ConfigInvalid, "initial q table has the wrong shape");
    return *settings.initial;
}

} // namespace

OptimalityReport solve_q(const InducedSmdp& smdp, const ReferenceFunction& f, const SolveSettings& settings) {
    require_weakly_communicating(smdp);
    if (f.num_pairs() != smdp.num_pairs()) throw Error(ErrorKind::ConfigInvalid, "reference function size mismatch");

    std::uint64_t iterations = 0;
    auto normalized = [&](const QTable& q, QTable& d) {
        const Residual res = bellman_residual(smdp, q, 0.0);
        for (std::size_t i = 0; i < q.size(); ++i)
            d[i] = res.per_pair[i] / smdp.exp_length()(static_cast<Eigen::Index>(i));
    };
    QTable q = relative_value_iteration(initial_table(settings, smdp.num_states(), smdp.num_options()), settings,
                                        normalized, iterations);
    const double r_star = optimal_reward_rate(smdp);
    QTable witness = pin(std::move(q), f, r_star);
    const double residual = bellman_residual(smdp, witness, r_star).sup_norm;
    if (residual > settings.tol)
        throw Error(ErrorKind::NoConvergence, "witness residual " + std::to_string(residual) + " exceeds tolerance");
    const double f_value = f(witness);
    return {r_star, std::move(witness), residual, f_value, iterations};
}

OptimalityReport solve_q_intra(const TabularMdp& model, const std::vector<OptionSpec>& options,
                               const ReferenceFunction& f, const SolveSettings& settings) {
    const double r_star = optimal_reward_rate(induce_smdp(model, options));
    QTable start = initial_table(settings, model.num_states(), options.size());
    check_intra_inputs(model, options, start);

    std::uint64_t iterations = 0;
    auto normalized = [&](const QTable& q, QTable& d) {
        d = intra_rhs(model, options, q, 0.0);
        for (std::size_t i = 0; i < q.size(); ++i) d[i] -= q[i];
    };
    QTable q = relative_value_iteration(std::move(start), settings, normalized, iterations);
    QTable witness = pin(std::move(q), f, r_star);
    const double residual = intra_option_residual(model, options, witness, r_star).sup_norm;
    if (residual > settings.tol)
        throw Error(ErrorKind::NoConvergence, "witness residual " + std::to_string(residual) + " exceeds tolerance");
    const double f_value = f(witness);
    return {r_star, std::move(witness), residual, f_value, iterations};
}

namespace {

QTable random_table(std::size_t ns, std::size_t no, Rng& rng) {
    QTable q(ns, no);
    for (auto& v : q.values()) v = rng.uniform(-10.0, 10.0);
    return q;
}

} // namespace

bool zero_reward_uniqueness_check(const InducedSmdp& smdp, const ReferenceFunction& f, std::size_t trials,
                                  std::uint64_t seed) {
    if (!(smdp.exp_reward().array() == 0.0).all())
        throw Error(ErrorKind::PreconditionViolation, "uniqueness check requires all rewards to be zero");
    Rng rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        SolveSettings settings;
        settings.tol = 1e-10;
        settings.initial = random_table(smdp.num_states(), smdp.num_options(), rng);
        if (solve_q(smdp, f, settings).witness_q.sup_norm() > 1e-6) return false;
    }
    return true;
}

ProbeReport solution_set_probe(const InducedSmdp& smdp, const ReferenceFunction& f, std::size_t samples,
                               std::uint64_t seed) {
    Rng rng(seed);
    ProbeReport report{0.0, {}, {}, {}};
    for (std::size_t t = 0; t < samples; ++t) {
        SolveSettings settings;
        settings.tol = 1e-10;
        settings.initial = random_table(smdp.num_states(), smdp.num_options(), rng);
        OptimalityReport found = solve_q(smdp, f, settings);
        if (report.members.empty()) report.r_star = found.r_star;
        const bool seen = std::any_of(report.members.begin(), report.members.end(), [&](const QTable& m) {
            return sup_distance(m, found.witness_q) <= kDistinctMemberThreshold;
        });
        if (seen) continue;
        report.members.push_back(std::move(found.witness_q));
        report.member_residuals.push_back(found.residual_sup);
    }
    for (std::size_t i = 0; i < report.members.size(); ++i)
        for (std::size_t j = i + 1; j < report.members.size(); ++j)
            report.midpoints.push_back(
                {i, j, bellman_residual(smdp, midpoint(report.members[i], report.members[j]), report.r_star).sup_norm});
    return report;
}

} // namespace avgrl
