#include "avgrl/error.hpp"
#include "avgrl/options.hpp"

#include "doctest.h"
#include "support.hpp"

#include <cmath>

using namespace avgrl;

namespace {

OptionSpec fixed_option(const TabularMdp& m, std::size_t action, std::vector<double> beta, const std::string& name) {
    const auto ns = static_cast<Eigen::Index>(m.num_states());
    OptionSpec o{name, Eigen::MatrixXd::Zero(ns, static_cast<Eigen::Index>(m.num_actions())), Eigen::VectorXd(ns)};
    for (Eigen::Index s = 0; s < ns; ++s) {
        o.policy(s, static_cast<Eigen::Index>(action)) = 1.0;
        o.termination(s) = beta[static_cast<std::size_t>(s)];
    }
    return o;
}

// dashed in both states, stops only on arrival at state "1"
OptionSpec dashed_until_first(const TabularMdp& sw) { return fixed_option(sw, 1, {1.0, 0.0}, "dash_home"); }

} // namespace

TEST_CASE("termination reachability on the support graph") {
    const TabularMdp sw = builtin("TwoStateSwitch");
    CHECK(check_assumption1(sw, fixed_option(sw, 0, {1.0, 1.0}, "o")));
    CHECK_FALSE(check_assumption1(sw, fixed_option(sw, 1, {0.0, 0.0}, "o")));
    CHECK(check_assumption1(sw, dashed_until_first(sw)));
    // solid self-loops in state 2 never reach the terminating state
    CHECK_FALSE(check_assumption1(sw, fixed_option(sw, 0, {1.0, 0.0}, "o")));
}

TEST_CASE("option_moments examples") {
    const TabularMdp sw = builtin("TwoStateSwitch");
    const OptionMoments one = option_moments(sw, fixed_option(sw, 1, {1.0, 1.0}, "d"));
    CHECK(one.exp_length(0) == 1.0);
    CHECK(one.exp_length(1) == 1.0);
    CHECK(one.exp_reward(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(one.exp_reward(1) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(one.landing(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(one.landing(0, 0)) < 1e-14);

    const OptionMoments home = option_moments(sw, dashed_until_first(sw));
    CHECK(home.exp_length(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(home.exp_reward(0) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(home.landing(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(home.exp_length(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(home.landing(1, 0) == doctest::Approx(1.0).epsilon(1e-12));

    try {
        option_moments(sw, fixed_option(sw, 1, {0.0, 0.0}, "never"));
        FAIL("expected NonProperOption");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonProperOption);
    }
}

TEST_CASE("induce_smdp of one-step options reproduces the base model") {
    for (const auto& name : builtin_names()) {
        const TabularMdp m = builtin(name);
        const InducedSmdp induced = induce_smdp(m, one_step_options(m));
        const InducedSmdp base = to_smdp(m);
        CHECK(induced.option_names() == m.action_names());
        CHECK((induced.exp_length().array() == 1.0).all());
        CHECK((induced.kernel() - base.kernel()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((induced.exp_reward() - base.exp_reward()).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(induce_smdp(builtin("Triangle"), {}), Error);
    try {
        induce_smdp(builtin("Triangle"), {});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyModel);
    }
}

TEST_CASE("option lengths are reward-shift invariant and rewards shift by length") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const TabularMdp m = testing::random_mdp(2 + rng.next() % 4, 1 + rng.next() % 3, rng);
        const OptionSpec o = testing::random_option(m, rng, "o");
        const double kappa = rng.uniform(-3.0, 3.0);
        const OptionMoments a = option_moments(m, o);
        const OptionMoments b = option_moments(transform_rewards(m, 1.0, kappa), o);
        CHECK((a.exp_length - b.exp_length).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((a.exp_reward + kappa * a.exp_length - b.exp_reward).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((a.landing.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("execute_option examples") {
    const TabularMdp sw = builtin("TwoStateSwitch");
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        const OptionOutcome out = execute_option(sw, dashed_until_first(sw), 0, rng);
        CHECK(out.terminal == 0);
        CHECK(out.reward == -2.0);
        CHECK(out.length == 2);
        CHECK(execute_option(sw, fixed_option(sw, 0, {1.0, 1.0}, "s"), 1, rng).length == 1);
    }

    const TabularMdp wc = builtin("WeaklyComm3");
    const OptionSpec step = one_step_option(wc, 0);
    double total = 0.0;
    for (int i = 0; i < 1000; ++i) total += static_cast<double>(execute_option(wc, step, 0, rng).length);
    CHECK(total / 1000.0 == 1.0);

    try {
        execute_option(sw, fixed_option(sw, 0, {0.0, 0.0}, "stuck"), 0, rng, 50);
        FAIL("expected StepLimitExceeded");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::StepLimitExceeded);
    }
}

TEST_CASE("two-option induced SMDP agrees with rollouts within 3 standard errors") {
    const TabularMdp sw = builtin("TwoStateSwitch");
    const std::vector<OptionSpec> options{fixed_option(sw, 0, {1.0, 1.0}, "solid"), dashed_until_first(sw)};
    const InducedSmdp smdp = induce_smdp(sw, options);
    const OptionMoments home = option_moments(sw, options[1]);
    CHECK(smdp.length(0, 1) == home.exp_length(0));
    CHECK(smdp.reward(1, 1) == home.exp_reward(1));

    // randomize the dynamics a little so the check is not vacuous
    RawModel raw = to_raw(sw);
    raw.transitions = {{0, 0, 0, 0.0, 0.7}, {0, 0, 1, 1.0, 0.3}, {0, 1, 1, -1.0, 0.6}, {0, 1, 0, 2.0, 0.4},
                       {1, 0, 1, 0.0, 0.5}, {1, 0, 0, 3.0, 0.5}, {1, 1, 0, -1.0, 0.8}, {1, 1, 1, 0.5, 0.2}};
    const TabularMdp noisy = validate_mdp(raw);
    const InducedSmdp ns = induce_smdp(noisy, options);
    Rng rng(99);
    const int n = 100000;
    for (std::size_t o = 0; o < options.size(); ++o)
        for (std::size_t s = 0; s < 2; ++s) {
            double sr = 0, sr2 = 0, sl = 0, sl2 = 0, land = 0;
            for (int i = 0; i < n; ++i) {
                const OptionOutcome out = execute_option(noisy, options[o], s, rng);
                const double l = static_cast<double>(out.length);
                sr += out.reward;
                sr2 += out.reward * out.reward;
                sl += l;
                sl2 += l * l;
                land += out.terminal == 0 ? 1.0 : 0.0;
            }
            const double mr = sr / n, ml = sl / n, mp = land / n;
            const double se_r = std::sqrt((sr2 / n - mr * mr) / n);
            const double se_l = std::sqrt((sl2 / n - ml * ml) / n);
            const double se_p = std::sqrt(mp * (1 - mp) / n);
            CHECK(std::abs(mr - ns.reward(s, o)) <= 3 * se_r + 1e-12);
            CHECK(std::abs(ml - ns.length(s, o)) <= 3 * se_l + 1e-12);
            CHECK(std::abs(mp - ns.kernel()(static_cast<Eigen::Index>(ns.pair(s, o)), 0)) <= 3 * se_p + 1e-12);
        }
}

TEST_CASE("validate_option rejects malformed options") {
    const TabularMdp sw = builtin("TwoStateSwitch");
    OptionSpec bad = fixed_option(sw, 0, {1.0, 1.0}, "bad");
    bad.policy(0, 1) = 0.5;
    CHECK_THROWS_AS(validate_option(sw, bad), Error);
    OptionSpec beta = fixed_option(sw, 0, {1.5, 1.0}, "beta");
    CHECK_THROWS_AS(validate_option(sw, beta), Error);
    OptionSpec shape{"shape", Eigen::MatrixXd::Ones(3, 1), Eigen::VectorXd::Ones(3)};
    CHECK_THROWS_AS(validate_option(sw, shape), Error);
}
