#include "avgrl/learners.hpp"

#include "avgrl/error.hpp"

#include <cmath>

namespace avgrl {

StepSizeSchedule StepSizeSchedule::constant(double c) {
    if (!(c > 0.0)) throw Error(ErrorKind::ConfigInvalid, "step size must be positive");
    return {Law::Constant, c, 1.0, 1.0};
}

StepSizeSchedule StepSizeSchedule::harmonic(double c, double n0) {
    if (!(c > 0.0) || !(n0 > 0.0)) throw Error(ErrorKind::ConfigInvalid, "harmonic schedule needs c > 0 and n0 > 0");
    return {Law::Harmonic, c, n0, 1.0};
}

StepSizeSchedule StepSizeSchedule::polynomial(double c, double power) {
    if (!(c > 0.0) || !(power > 0.5 && power <= 1.0))
        throw Error(ErrorKind::ConfigInvalid, "polynomial schedule needs c > 0 and power in (0.5, 1]");
    return {Law::Polynomial, c, 1.0, power};
}

double StepSizeSchedule::operator()(std::uint64_t n) const {
    const auto dn = static_cast<double>(n);
    switch (law) {
    case Law::Constant: return c;
    case Law::Harmonic: return c / (dn + n0);
    case Law::Polynomial: return c / std::pow(dn + 1.0, power);
    }
    return c;
}

double grviq_step(GeneralRviState& state, std::size_t i, double reward_target, double next_target, double offset,
                  double noise) {
    const double alpha = state.alpha(state.visits[i]);
    const double td = reward_target - offset + next_target - state.q[i] + noise;
    const double increment = alpha * td;
    const double updated = state.q[i] + increment;
    if (!std::isfinite(updated)) throw Error(ErrorKind::NonFiniteUpdate, "update of index " + std::to_string(i));
    state.q[i] = updated;
    ++state.visits[i];
    return increment;
}

LearnerState make_learner_state(std::size_t num_states, std::size_t num_choices, double q0, double r_bar0, double eta,
                                StepSizeSchedule alpha, StepSizeSchedule beta) {
    if (!(eta > 0.0)) throw Error(ErrorKind::ConfigInvalid, "eta must be positive");
    LearnerState state;
    state.core = {QTable(num_states, num_choices, q0), std::vector<std::uint64_t>(num_states * num_choices, 0), alpha};
    state.r_bar = r_bar0;
    state.eta = eta;
    state.length_est.assign(num_states * num_choices, 1.0);
    state.beta = beta;
    return state;
}

namespace {

void commit(LearnerState& state, std::size_t i, double q_new, double r_bar_new) {
    if (!std::isfinite(q_new) || !std::isfinite(r_bar_new))
        throw Error(ErrorKind::NonFiniteUpdate, "update of pair " + std::to_string(i));
    state.core.q[i] = q_new;
    state.r_bar = r_bar_new;
    ++state.core.visits[i];
}

} // namespace

double dql_step(LearnerState& state, const Experience& x) {
    QTable& q = state.core.q;
    const std::size_t i = q.pair(x.s, x.a);
    const double alpha = state.core.alpha(state.core.visits[i]);
    const double delta = x.reward - state.r_bar + q.row_max(x.next) - q[i];
    const double increment = alpha * delta;
    commit(state, i, q[i] + increment, state.r_bar + state.eta * increment);
    return delta;
}

double rviql_step(LearnerState& state, const ReferenceFunction& f, const Experience& x) {
    QTable& q = state.core.q;
    const std::size_t i = q.pair(x.s, x.a);
    const double alpha = state.core.alpha(state.core.visits[i]);
    const double delta = x.reward - f(q) + q.row_max(x.next) - q[i];
    commit(state, i, q[i] + alpha * delta, state.r_bar);
    return delta;
}

double inter_option_dql_step(LearnerState& state, const OptionExperience& x) {
    QTable& q = state.core.q;
    const std::size_t i = q.pair(x.s, x.o);
    const double length = state.length_est[i];
    if (!(length > 0.0)) throw Error(ErrorKind::NonPositiveLength, "length estimate of pair " + std::to_string(i));
    const std::uint64_t n = state.core.visits[i];
    const double alpha = state.core.alpha(n);
    const double delta = x.reward - length * state.r_bar + q.row_max(x.next) - q[i];
    const double increment = alpha * delta / length;
    const double length_new = length + state.beta(n) * (x.length - length);
    if (!std::isfinite(length_new)) throw Error(ErrorKind::NonFiniteUpdate, "length update of pair " + std::to_string(i));
    commit(state, i, q[i] + increment, state.r_bar + state.eta * increment);
    state.length_est[i] = length_new;
    return delta;
}

namespace {

double behaviour_probability(const std::vector<OptionSpec>& options, std::size_t executing, const Experience& x) {
    if (executing >= options.size()) throw Error(ErrorKind::ConfigInvalid, "executing option out of range");
    const double p = options[executing].policy(static_cast<Eigen::Index>(x.s), static_cast<Eigen::Index>(x.a));
    if (!(p > 0.0)) throw Error(ErrorKind::ZeroBehaviorProb, "executing option never takes this action");
    return p;
}

double continuation_value(const QTable& q, const OptionSpec& option, std::size_t o, std::size_t next) {
    const double beta = option.termination(static_cast<Eigen::Index>(next));
    return (1.0 - beta) * q(next, o) + beta * q.row_max(next);
}

} // namespace

void intra_option_dql_step(LearnerState& state, const Experience& x, std::size_t executing,
                           const std::vector<OptionSpec>& options) {
    QTable& q = state.core.q;
    const double behaviour = behaviour_probability(options, executing, x);

    // all TD errors come from the pre-update table
    std::vector<double> increments(options.size(), 0.0);
    std::vector<bool> touched(options.size(), false);
    double total = 0.0;
    for (std::size_t o = 0; o < options.size(); ++o) {
        const double p = options[o].policy(static_cast<Eigen::Index>(x.s), static_cast<Eigen::Index>(x.a));
        if (!(p > 0.0)) continue;
        const std::size_t i = q.pair(x.s, o);
        const double rho = p / behaviour;
        const double alpha = state.core.alpha(state.core.visits[i]);
        const double delta = x.reward - state.r_bar + continuation_value(q, options[o], o, x.next) - q[i];
        increments[o] = alpha * rho * delta;
        touched[o] = true;
        total += increments[o];
    }
    const double r_bar_new = state.r_bar + state.eta * total;
    for (std::size_t o = 0; o < options.size(); ++o)
        if (touched[o] && !std::isfinite(q(x.s, o) + increments[o]))
            throw Error(ErrorKind::NonFiniteUpdate, "intra-option update of option " + std::to_string(o));
    if (!std::isfinite(r_bar_new)) throw Error(ErrorKind::NonFiniteUpdate, "intra-option reward-rate update");
    for (std::size_t o = 0; o < options.size(); ++o) {
        if (!touched[o]) continue;
        const std::size_t i = q.pair(x.s, o);
        q[i] += increments[o];
        ++state.core.visits[i];
    }
    state.r_bar = r_bar_new;
}

namespace kernel {

void dql_step(LearnerState& state, const Experience& x) {
    const QTable& q = state.core.q;
    const double increment = grviq_step(state.core, q.pair(x.s, x.a), x.reward, q.row_max(x.next), state.r_bar);
    state.r_bar += state.eta * increment;
}

void rviql_step(LearnerState& state, const ReferenceFunction& f, const Experience& x) {
    const QTable& q = state.core.q;
    grviq_step(state.core, q.pair(x.s, x.a), x.reward, q.row_max(x.next), f(q));
}

void inter_option_dql_step(LearnerState& state, const OptionExperience& x) {
    const QTable& q = state.core.q;
    const std::size_t i = q.pair(x.s, x.o);
    const double length = state.length_est[i];
    if (!(length > 0.0)) throw Error(ErrorKind::NonPositiveLength, "length estimate of pair " + std::to_string(i));
    const std::uint64_t n = state.core.visits[i];
    // R = R_hat / L, F = r_bar, G = (max q(s') - q(s,o)) / L + q(s,o)
    const double next_target = (q.row_max(x.next) - q[i]) / length + q[i];
    const double increment = grviq_step(state.core, i, x.reward / length, next_target, state.r_bar);
    state.r_bar += state.eta * increment;
    state.length_est[i] = length + state.beta(n) * (x.length - length);
}

void intra_option_dql_step(LearnerState& state, const Experience& x, std::size_t executing,
                           const std::vector<OptionSpec>& options) {
    QTable& q = state.core.q;
    const double behaviour = behaviour_probability(options, executing, x);
    struct Target {
        std::size_t i;
        double reward;
        double next;
    };
    std::vector<Target> targets;
    for (std::size_t o = 0; o < options.size(); ++o) {
        const double p = options[o].policy(static_cast<Eigen::Index>(x.s), static_cast<Eigen::Index>(x.a));
        if (!(p > 0.0)) continue;
        const std::size_t i = q.pair(x.s, o);
        const double rho = p / behaviour;
        // R - F = rho (r - r_bar), G - Q = rho (u - q)
        targets.push_back({i, rho * (x.reward - state.r_bar) + state.r_bar,
                           rho * (continuation_value(q, options[o], o, x.next) - q[i]) + q[i]});
    }
    const double offset = state.r_bar;
    double total = 0.0;
    for (const auto& t : targets) total += grviq_step(state.core, t.i, t.reward, t.next, offset);
    state.r_bar += state.eta * total;
}

} // namespace kernel

std::vector<std::size_t> greedy_policy(const QTable& q) {
    std::vector<std::size_t> choice(q.num_states());
    for (std::size_t s = 0; s < q.num_states(); ++s) choice[s] = q.argmax(s);
    return choice;
}

StationaryPolicy greedy_stationary(const QTable& q) {
    return StationaryPolicy::deterministic(q.num_choices(), greedy_policy(q));
}

} // namespace avgrl
