#pragma once

#include "avgrl/mdp.hpp"
#include "avgrl/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace avgrl {

/// A temporally extended action: internal policy pi(a | s, o) and
/// termination probability beta(s, o) evaluated on arrival at s.
struct OptionSpec {
    std::string name;
    Eigen::MatrixXd policy;      // S x A
    Eigen::VectorXd termination; // S
};

/// Throws NonStochasticRow / ConfigInvalid when the option does not fit the model.
void validate_option(const TabularMdp& model, const OptionSpec& option);

/// The primitive action `a` as an option that always terminates after one step.
OptionSpec one_step_option(const TabularMdp& model, std::size_t a);
std::vector<OptionSpec> one_step_options(const TabularMdp& model);

/**
 * SMDP induced by a model and an option set, kept as the three marginals of
 * the joint option kernel that the optimality equations and learners use:
 * landing distribution, expected cumulative reward, and expected duration.
 *
 * Pair (s, o) is stored at row s * num_options() + o. Base MDPs are one-step
 * SMDPs with duration identically 1 (see to_smdp()).
 */
class InducedSmdp {
public:
    InducedSmdp(std::vector<std::string> state_names, std::vector<std::string> option_names,
                Eigen::MatrixXd kernel, Eigen::VectorXd exp_reward, Eigen::VectorXd exp_length);

    std::size_t num_states() const noexcept { return state_names_.size(); }
    std::size_t num_options() const noexcept { return option_names_.size(); }
    std::size_t num_pairs() const noexcept { return num_states() * num_options(); }
    std::size_t pair(std::size_t s, std::size_t o) const noexcept { return s * num_options() + o; }

    const Eigen::MatrixXd& kernel() const noexcept { return kernel_; }
    const Eigen::VectorXd& exp_reward() const noexcept { return exp_reward_; }
    const Eigen::VectorXd& exp_length() const noexcept { return exp_length_; }

    double reward(std::size_t s, std::size_t o) const { return exp_reward_(pair(s, o)); }
    double length(std::size_t s, std::size_t o) const { return exp_length_(pair(s, o)); }

    const std::vector<std::string>& state_names() const noexcept { return state_names_; }
    const std::vector<std::string>& option_names() const noexcept { return option_names_; }

private:
    std::vector<std::string> state_names_;
    std::vector<std::string> option_names_;
    Eigen::MatrixXd kernel_;
    Eigen::VectorXd exp_reward_;
    Eigen::VectorXd exp_length_;
};

/// Base MDP viewed as a one-step SMDP.
InducedSmdp to_smdp(const TabularMdp& model);

StructureClass classify_structure(const InducedSmdp& smdp);

/// True iff from every start state the option terminates within |S| steps
/// with positive probability. Decided on the support graph, so no
/// floating-point threshold is involved.
bool check_assumption1(const TabularMdp& model, const OptionSpec& option);

struct OptionMoments {
    Eigen::VectorXd exp_reward; // S
    Eigen::VectorXd exp_length; // S
    Eigen::MatrixXd landing;    // S x S
};

/// Continuation kernel C(s, s') = sum_a pi(a|s) p(s'|s,a) (1 - beta(s')).
Eigen::MatrixXd continuation_kernel(const TabularMdp& model, const OptionSpec& option);

/// Expected cumulative reward, expected duration and termination-state
/// distribution of the option from every start state, via (I - C) x = b.
/// Throws NonProperOption when check_assumption1 fails.
OptionMoments option_moments(const TabularMdp& model, const OptionSpec& option);

/// Throws EmptyModel on an empty option list; propagates NonProperOption.
InducedSmdp induce_smdp(const TabularMdp& model, const std::vector<OptionSpec>& options);

struct OptionOutcome {
    std::size_t terminal;
    double reward;
    std::uint64_t length;
};

inline constexpr std::uint64_t kDefaultStepCap = 1'000'000;

/// Samples one execution of `option` from `start`. Termination is drawn on
/// arrival at each successor state. Throws StepLimitExceeded past `step_cap`.
OptionOutcome execute_option(const TabularMdp& model, const OptionSpec& option, std::size_t start, Rng& rng,
                             std::uint64_t step_cap = kDefaultStepCap);

/// Samples (s', r) from the kernel row of (s, a).
struct StepOutcome {
    std::size_t next;
    double reward;
};
StepOutcome sample_step(const TabularMdp& model, std::size_t s, std::size_t a, Rng& rng);

} // namespace avgrl
