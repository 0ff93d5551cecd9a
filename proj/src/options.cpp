#include "avgrl/options.hpp"

#include "avgrl/error.hpp"
#include "avgrl/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace avgrl {

void validate_option(const TabularMdp& model, const OptionSpec& option) {
    const auto ns = static_cast<Eigen::Index>(model.num_states());
    const auto na = static_cast<Eigen::Index>(model.num_actions());
    if (option.policy.rows() != ns || option.policy.cols() != na || option.termination.size() != ns)
        throw Error(ErrorKind::ConfigInvalid, "option '" + option.name + "' does not match the model shape");
    for (Eigen::Index s = 0; s < ns; ++s) {
        if (!((option.policy.row(s).array() >= 0.0).all()))
            throw Error(ErrorKind::NonStochasticRow, "option '" + option.name + "' has a negative probability");
        if (std::abs(option.policy.row(s).sum() - 1.0) > kRowSumTolerance)
            throw Error(ErrorKind::NonStochasticRow, "option '" + option.name + "' policy row " +
                                                         std::to_string(s) + " is not a distribution");
        const double beta = option.termination(s);
        if (!(beta >= 0.0 && beta <= 1.0))
            throw Error(ErrorKind::ConfigInvalid, "option '" + option.name + "' termination outside [0, 1]");
    }
}

OptionSpec one_step_option(const TabularMdp& model, std::size_t a) {
    OptionSpec option{model.action_names().at(a),
                      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(model.num_states()),
                                            static_cast<Eigen::Index>(model.num_actions())),
                      Eigen::VectorXd::Ones(static_cast<Eigen::Index>(model.num_states()))};
    option.policy.col(static_cast<Eigen::Index>(a)).setOnes();
    return option;
}

std::vector<OptionSpec> one_step_options(const TabularMdp& model) {
    std::vector<OptionSpec> options;
    for (std::size_t a = 0; a < model.num_actions(); ++a) options.push_back(one_step_option(model, a));
    return options;
}

InducedSmdp::InducedSmdp(std::vector<std::string> state_names, std::vector<std::string> option_names,
                         Eigen::MatrixXd kernel, Eigen::VectorXd exp_reward, Eigen::VectorXd exp_length)
    : state_names_(std::move(state_names)), option_names_(std::move(option_names)), kernel_(std::move(kernel)),
      exp_reward_(std::move(exp_reward)), exp_length_(std::move(exp_length)) {
    if (state_names_.empty() || option_names_.empty())
        throw Error(ErrorKind::EmptyModel, "SMDP needs at least one state and one option");
    const auto pairs = static_cast<Eigen::Index>(num_pairs());
    if (kernel_.rows() != pairs || kernel_.cols() != static_cast<Eigen::Index>(num_states()) ||
        exp_reward_.size() != pairs || exp_length_.size() != pairs)
        throw Error(ErrorKind::ConfigInvalid, "SMDP tables have inconsistent shapes");
    for (Eigen::Index i = 0; i < pairs; ++i) {
        if (std::abs(kernel_.row(i).sum() - 1.0) > 1e-10 || (kernel_.row(i).array() < 0.0).any())
            throw Error(ErrorKind::NonStochasticRow, "SMDP landing row " + std::to_string(i) + " is not a distribution");
        if (!(exp_length_(i) >= 1.0 - 1e-12))
            throw Error(ErrorKind::NonPositiveLength, "SMDP expected length below 1 at row " + std::to_string(i));
    }
}

InducedSmdp to_smdp(const TabularMdp& model) {
    const std::size_t ns = model.num_states();
    const std::size_t na = model.num_actions();
    const auto pairs = static_cast<Eigen::Index>(ns * na);
    Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(pairs, static_cast<Eigen::Index>(ns));
    Eigen::VectorXd reward(pairs);
    for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t a = 0; a < na; ++a) {
            const auto row = static_cast<Eigen::Index>(s * na + a);
            for (const auto& t : model.outcomes(s, a)) kernel(row, static_cast<Eigen::Index>(t.next)) += t.prob;
            reward(row) = model.expected_reward(s, a);
        }
    }
    return {model.state_names(), model.action_names(), std::move(kernel), std::move(reward),
            Eigen::VectorXd::Ones(pairs)};
}

StructureClass classify_structure(const InducedSmdp& smdp) {
    SupportGraph support(smdp.num_states());
    for (std::size_t s = 0; s < smdp.num_states(); ++s) {
        support[s].resize(smdp.num_options());
        for (std::size_t o = 0; o < smdp.num_options(); ++o) {
            const auto row = static_cast<Eigen::Index>(smdp.pair(s, o));
            for (Eigen::Index next = 0; next < smdp.kernel().cols(); ++next)
                if (smdp.kernel()(row, next) > 0.0) support[s][o].push_back(static_cast<std::size_t>(next));
        }
    }
    return classify_support(support);
}

bool check_assumption1(const TabularMdp& model, const OptionSpec& option) {
    validate_option(model, option);
    const std::size_t ns = model.num_states();
    const auto idx = [](std::size_t i) { return static_cast<Eigen::Index>(i); };

    // can_stop[s]: termination has positive probability within k steps from s
    std::vector<bool> can_stop(ns, false);
    for (std::size_t step = 0; step < ns; ++step) {
        std::vector<bool> next = can_stop;
        for (std::size_t s = 0; s < ns; ++s) {
            if (next[s]) continue;
            for (std::size_t a = 0; a < model.num_actions() && !next[s]; ++a) {
                if (option.policy(idx(s), idx(a)) <= 0.0) continue;
                for (const auto& t : model.outcomes(s, a)) {
                    const double beta = option.termination(idx(t.next));
                    if (beta > 0.0 || (beta < 1.0 && can_stop[t.next])) {
                        next[s] = true;
                        break;
                    }
                }
            }
        }
        can_stop = std::move(next);
    }
    return std::all_of(can_stop.begin(), can_stop.end(), [](bool b) { return b; });
}

Eigen::MatrixXd continuation_kernel(const TabularMdp& model, const OptionSpec& option) {
    const auto ns = static_cast<Eigen::Index>(model.num_states());
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(ns, ns);
    for (Eigen::Index s = 0; s < ns; ++s)
        for (Eigen::Index a = 0; a < option.policy.cols(); ++a) {
            const double pi = option.policy(s, a);
            for (const auto& t : model.outcomes(static_cast<std::size_t>(s), static_cast<std::size_t>(a))) {
                const auto next = static_cast<Eigen::Index>(t.next);
                c(s, next) += pi * (t.prob * (1.0 - option.termination(next)));
            }
        }
    return c;
}

OptionMoments option_moments(const TabularMdp& model, const OptionSpec& option) {
    if (!check_assumption1(model, option))
        throw Error(ErrorKind::NonProperOption, "option '" + option.name + "' can run forever from some state");

    const auto ns = static_cast<Eigen::Index>(model.num_states());
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(ns, ns + 2); // [reward | length | landing]
    for (Eigen::Index s = 0; s < ns; ++s) {
        rhs(s, 1) = 1.0;
        for (Eigen::Index a = 0; a < option.policy.cols(); ++a) {
            const double pi = option.policy(s, a);
            rhs(s, 0) += pi * model.expected_reward(static_cast<std::size_t>(s), static_cast<std::size_t>(a));
            for (const auto& t : model.outcomes(static_cast<std::size_t>(s), static_cast<std::size_t>(a))) {
                const auto next = static_cast<Eigen::Index>(t.next);
                rhs(s, 2 + next) += pi * (t.prob * option.termination(next));
            }
        }
    }
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(ns, ns) - continuation_kernel(model, option);
    const Eigen::MatrixXd x =
        guarded_solve(system, rhs, ErrorKind::NonProperOption, "option '" + option.name + "' SSP system singular");
    // landing probabilities are nonnegative; clear rounding residue on structural zeros
    return {x.col(0), x.col(1), x.rightCols(ns).cwiseMax(0.0)};
}

InducedSmdp induce_smdp(const TabularMdp& model, const std::vector<OptionSpec>& options) {
    if (options.empty()) throw Error(ErrorKind::EmptyModel, "option list is empty");
    const auto ns = static_cast<Eigen::Index>(model.num_states());
    const auto no = static_cast<Eigen::Index>(options.size());
    Eigen::MatrixXd kernel(ns * no, ns);
    Eigen::VectorXd reward(ns * no);
    Eigen::VectorXd length(ns * no);
    std::vector<std::string> names;
    for (Eigen::Index o = 0; o < no; ++o) {
        const auto& option = options[static_cast<std::size_t>(o)];
        names.push_back(option.name.empty() ? "o" + std::to_string(o) : option.name);
        const OptionMoments m = option_moments(model, option);
        for (Eigen::Index s = 0; s < ns; ++s) {
            kernel.row(s * no + o) = m.landing.row(s);
            reward(s * no + o) = m.exp_reward(s);
            length(s * no + o) = m.exp_length(s);
        }
    }
    return {model.state_names(), std::move(names), std::move(kernel), std::move(reward), std::move(length)};
}

StepOutcome sample_step(const TabularMdp& model, std::size_t s, std::size_t a, Rng& rng) {
    const auto& row = model.outcomes(s, a);
    std::vector<double> probs(row.size());
    std::transform(row.begin(), row.end(), probs.begin(), [](const Transition& t) { return t.prob; });
    const auto& t = row[rng.categorical(probs)];
    return {t.next, t.reward};
}

OptionOutcome execute_option(const TabularMdp& model, const OptionSpec& option, std::size_t start, Rng& rng,
                             std::uint64_t step_cap) {
    const auto na = static_cast<std::size_t>(option.policy.cols());
    std::vector<double> pi(na);
    OptionOutcome out{start, 0.0, 0};
    std::size_t s = start;
    while (true) {
        if (out.length >= step_cap)
            throw Error(ErrorKind::StepLimitExceeded, "option '" + option.name + "' exceeded " +
                                                          std::to_string(step_cap) + " steps");
        for (std::size_t a = 0; a < na; ++a)
            pi[a] = option.policy(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
        const std::size_t a = rng.categorical(pi);
        const StepOutcome step = sample_step(model, s, a, rng);
        out.reward += step.reward;
        ++out.length;
        s = step.next;
        const double beta = option.termination(static_cast<Eigen::Index>(s));
        if (beta >= 1.0 || (beta > 0.0 && rng.uniform() < beta)) break;
    }
    out.terminal = s;
    return out;
}

} // namespace avgrl
