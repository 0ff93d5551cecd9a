#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace avgrl {

/// One (s', r) outcome of a state-action pair.
struct Transition {
    std::size_t next;
    double reward;
    double prob;

    bool operator==(const Transition&) const = default;
};

/// Unvalidated model description, as read from a file or assembled in code.
struct RawTransition {
    std::size_t s;
    std::size_t a;
    std::size_t next;
    double reward;
    double prob;
};

struct RawModel {
    std::vector<std::string> states;
    std::vector<std::string> actions;
    std::vector<RawTransition> transitions;
};

/**
 * Finite MDP with a finite-support reward-transition kernel p(s', r | s, a).
 *
 * Instances are only produced by validate_mdp() (or builtin()), so every
 * state-action row is a probability distribution over valid successor
 * states with duplicate (s', r) outcomes merged and sorted.
 */
class TabularMdp {
public:
    std::size_t num_states() const noexcept { return state_names_.size(); }
    std::size_t num_actions() const noexcept { return action_names_.size(); }

    const std::vector<Transition>& outcomes(std::size_t s, std::size_t a) const {
        return kernel_[s * num_actions() + a];
    }

    /// Sum over outcomes of prob * reward.
    double expected_reward(std::size_t s, std::size_t a) const;

    /// Marginal next-state distribution of (s, a).
    std::vector<double> next_state_distribution(std::size_t s, std::size_t a) const;

    const std::vector<std::string>& state_names() const noexcept { return state_names_; }
    const std::vector<std::string>& action_names() const noexcept { return action_names_; }

    std::size_t state_index(std::string_view name) const;
    std::size_t action_index(std::string_view name) const;

    bool operator==(const TabularMdp&) const = default;

private:
    friend TabularMdp validate_mdp(const RawModel& raw);

    std::vector<std::string> state_names_;
    std::vector<std::string> action_names_;
    std::vector<std::vector<Transition>> kernel_;
};

/// Row-sum tolerance accepted by validate_mdp.
inline constexpr double kRowSumTolerance = 1e-12;

/// Normalizes and validates a raw description. Throws Error with
/// NonStochasticRow, DanglingState or EmptyModel.
TabularMdp validate_mdp(const RawModel& raw);

/// Inverse of validate_mdp on normalized models.
RawModel to_raw(const TabularMdp& model);

/// Returns a copy of the model with every reward multiplied by `scale` and
/// shifted by `shift`. Scaling by zero yields the zero-reward variant.
TabularMdp transform_rewards(const TabularMdp& model, double scale, double shift);

/// Built-in models: "TwoStateSwitch", "Triangle", "WeaklyComm3".
TabularMdp builtin(std::string_view name);
std::vector<std::string> builtin_names();

enum class StructureTag { Communicating, WeaklyCommunicating, NotWeaklyCommunicating };

const char* to_string(StructureTag tag) noexcept;

struct StructureClass {
    StructureTag tag;
    std::vector<std::size_t> closed_class;
    std::vector<std::size_t> transient;
};

/// Successor support of every (state, choice) pair: support[s][a] lists the
/// states reachable in one transition with positive probability.
using SupportGraph = std::vector<std::vector<std::vector<std::size_t>>>;

/// Maximal end components of the decision graph, as a per-state membership flag.
std::vector<bool> end_component_states(const SupportGraph& support);

StructureClass classify_support(const SupportGraph& support);
StructureClass classify_structure(const TabularMdp& model);

/// Stationary Markov policy as an S x A table of action probabilities.
class StationaryPolicy {
public:
    StationaryPolicy(std::size_t num_states, std::size_t num_actions, std::vector<double> probs);

    static StationaryPolicy deterministic(std::size_t num_actions, const std::vector<std::size_t>& choice);
    static StationaryPolicy uniform(std::size_t num_states, std::size_t num_actions);

    std::size_t num_states() const noexcept { return states_; }
    std::size_t num_actions() const noexcept { return actions_; }
    double operator()(std::size_t s, std::size_t a) const { return probs_[s * actions_ + a]; }
    std::span<const double> row(std::size_t s) const { return {probs_.data() + s * actions_, actions_}; }

private:
    std::size_t states_;
    std::size_t actions_;
    std::vector<double> probs_;
};

} // namespace avgrl
