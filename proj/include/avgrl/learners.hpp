#pragma once

#include "avgrl/mdp.hpp"
#include "avgrl/options.hpp"
#include "avgrl/qtable.hpp"

#include <cstdint>
#include <vector>

namespace avgrl {

/// Step-size law indexed by the visit count n of the updated pair.
struct StepSizeSchedule {
    enum class Law { Constant, Harmonic, Polynomial };

    Law law = Law::Constant;
    double c = 0.1;
    double n0 = 1.0;   // harmonic offset: c / (n + n0)
    double power = 1.0; // polynomial exponent in (0.5, 1]: c / (n + 1)^power

    static StepSizeSchedule constant(double c);
    static StepSizeSchedule harmonic(double c, double n0 = 1.0);
    static StepSizeSchedule polynomial(double c, double power);

    double operator()(std::uint64_t n) const;

    /// sum alpha_n = inf and sum alpha_n^2 < inf. False for constant steps.
    bool satisfies_robbins_monro() const noexcept { return law != Law::Constant; }
};

/// Estimate vector and per-index visit counters of the general asynchronous
/// relative value iteration scheme that every learner here reduces to.
struct GeneralRviState {
    QTable q;
    std::vector<std::uint64_t> visits;
    StepSizeSchedule alpha;
};

/// Q(i) += alpha_{nu(i)} (R - F + G - Q(i) + eps); nu(i) += 1.
/// Returns the applied increment. Throws NonFiniteUpdate (state untouched).
double grviq_step(GeneralRviState& state, std::size_t i, double reward_target, double next_target, double offset,
                  double noise = 0.0);

struct LearnerState {
    GeneralRviState core;
    double r_bar = 0.0;
    double eta = 1.0;
    std::vector<double> length_est; // inter-option learner only; starts at 1
    StepSizeSchedule beta;          // step sizes of the length estimates
};

LearnerState make_learner_state(std::size_t num_states, std::size_t num_choices, double q0, double r_bar0, double eta,
                                StepSizeSchedule alpha, StepSizeSchedule beta = StepSizeSchedule::constant(0.1));

/// Primitive transition (s, a, r, s').
struct Experience {
    std::size_t s;
    std::size_t a;
    double reward;
    std::size_t next;
};

/// Completed option execution (s, o, cumulative reward, length, s').
struct OptionExperience {
    std::size_t s;
    std::size_t o;
    double reward;
    double length;
    std::size_t next;
};

/// Differential Q-learning. Returns the TD error.
double dql_step(LearnerState& state, const Experience& x);

/// RVI Q-learning with reference f evaluated on the pre-update table.
double rviql_step(LearnerState& state, const ReferenceFunction& f, const Experience& x);

/// Inter-option Differential Q-learning. The TD error reads L(s,o) before
/// the length estimate of the same step is updated.
double inter_option_dql_step(LearnerState& state, const OptionExperience& x);

/// Intra-option Differential Q-learning: one base transition taken while
/// executing option `executing` updates every option consistent with the
/// action. Throws ZeroBehaviorProb if the executing option cannot take x.a.
void intra_option_dql_step(LearnerState& state, const Experience& x, std::size_t executing,
                           const std::vector<OptionSpec>& options);

/// The same learners written as calls to grviq_step. DQL and RVI produce
/// bit-identical trajectories to the direct forms; the option learners fold
/// the 1/L scaling and importance ratios into the targets and agree up to
/// floating-point reassociation.
namespace kernel {
void dql_step(LearnerState& state, const Experience& x);
void rviql_step(LearnerState& state, const ReferenceFunction& f, const Experience& x);
void inter_option_dql_step(LearnerState& state, const OptionExperience& x);
void intra_option_dql_step(LearnerState& state, const Experience& x, std::size_t executing,
                           const std::vector<OptionSpec>& options);
} // namespace kernel

/// Argmax per state, ties to the lowest index.
std::vector<std::size_t> greedy_policy(const QTable& q);
StationaryPolicy greedy_stationary(const QTable& q);

} // namespace avgrl
