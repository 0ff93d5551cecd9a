#include "avgrl/error.hpp"
#include "avgrl/lp.hpp"
#include "avgrl/oracle.hpp"

#include "doctest.h"
#include "support.hpp"

#include <cmath>

using namespace avgrl;

namespace {

const QTable kTriangleQ1 = testing::table(3, 2, {1.0 / 2, -3.0 / 2, 1.0 / 2, 1.0 / 2, -1.0 / 2, 1.0 / 2});
const QTable kTriangleQ2 = testing::table(3, 2, {-2.0 / 3, -2.0 / 3, 4.0 / 3, 1.0 / 3, 1.0 / 3, -2.0 / 3});

} // namespace

TEST_CASE("optimal reward rate examples") {
    CHECK(std::abs(optimal_reward_rate(builtin("Triangle"))) < 1e-12);
    CHECK(std::abs(optimal_reward_rate(builtin("TwoStateSwitch"))) < 1e-12);
    CHECK(optimal_reward_rate(validate_mdp({{"x"}, {"stay"}, {{0, 0, 0, 5.0, 1.0}}})) == doctest::Approx(5.0));
    const TabularMdp isolated = validate_mdp({{"a", "b"}, {"stay"}, {{0, 0, 0, 0.0, 1.0}, {1, 0, 1, 0.0, 1.0}}});
    try {
        optimal_reward_rate(isolated);
        FAIL("expected NotWeaklyCommunicating");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotWeaklyCommunicating);
    }
}

TEST_CASE("enumeration and linear programming agree") {
    Rng rng(8);
    for (int trial = 0; trial < 40; ++trial) {
        const TabularMdp m = testing::random_weakly_communicating(6, 3, rng);
        const double a = optimal_reward_rate(m, RateMethod::Enumerate);
        const double b = optimal_reward_rate(m, RateMethod::LinearProgram);
        CHECK(std::abs(a - b) < 1e-9);
    }
    Rng orng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const TabularMdp m = testing::random_weakly_communicating(4, 2, orng);
        const std::vector<OptionSpec> options{testing::random_option(m, orng, "a"), testing::random_option(m, orng, "b")};
        const InducedSmdp smdp = induce_smdp(m, options);
        if (classify_structure(smdp).tag == StructureTag::NotWeaklyCommunicating) continue;
        CHECK(std::abs(optimal_reward_rate(smdp, RateMethod::Enumerate) -
                       optimal_reward_rate(smdp, RateMethod::LinearProgram)) < 1e-9);
    }
}

TEST_CASE("optimal rate shifts exactly with a reward offset") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const TabularMdp m = testing::random_weakly_communicating(5, 3, rng);
        const double kappa = rng.uniform(-5.0, 5.0);
        CHECK(optimal_reward_rate(transform_rewards(m, 1.0, kappa)) ==
              doctest::Approx(optimal_reward_rate(m) + kappa).epsilon(1e-12));
    }
}

TEST_CASE("simplex solves a small standard-form problem") {
    // maximize x0 + 2 x1 with x0 + x1 + s = 4, x1 + t = 3
    Eigen::MatrixXd a(2, 4);
    a << 1, 1, 1, 0, 0, 1, 0, 1;
    const LpSolution sol = maximize_standard_form(Eigen::Vector4d(1, 2, 0, 0), a, Eigen::Vector2d(4, 3));
    CHECK(sol.value == doctest::Approx(7.0));
    CHECK(sol.x(0) == doctest::Approx(1.0));
    CHECK(sol.x(1) == doctest::Approx(3.0));

    Eigen::MatrixXd infeasible(1, 1);
    infeasible << 1;
    CHECK_THROWS_AS(maximize_standard_form(Eigen::VectorXd::Ones(1), infeasible, Eigen::VectorXd::Constant(1, -1.0)), Error);
}

TEST_CASE("bellman residual at two known Triangle solutions and their midpoint") {
    const InducedSmdp tri = to_smdp(builtin("Triangle"));
    CHECK(bellman_residual(tri, kTriangleQ1, 0.0).sup_norm <= 1e-12);
    CHECK(bellman_residual(tri, kTriangleQ2, 0.0).sup_norm <= 1e-12);
    const Residual mid = bellman_residual(tri, midpoint(kTriangleQ1, kTriangleQ2), 0.0);
    CHECK(mid.per_pair(1, 1) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(mid.sup_norm == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("two non-parallel solutions of the switch model") {
    const InducedSmdp sw = to_smdp(builtin("TwoStateSwitch"));
    CHECK(bellman_residual(sw, testing::table(2, 2, {0, -2, -1, -1}), 0.0).sup_norm == 0.0);
    CHECK(bellman_residual(sw, testing::table(2, 2, {0, -1, 0, -1}), 0.0).sup_norm == 0.0);
}

TEST_CASE("residual is invariant under constant shifts") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const TabularMdp m = testing::random_mdp(1 + rng.next() % 5, 1 + rng.next() % 3, rng);
        const InducedSmdp smdp = to_smdp(m);
        QTable q(m.num_states(), m.num_actions());
        for (double& v : q.values()) v = rng.uniform(-3.0, 3.0);
        const double r_bar = rng.uniform(-1.0, 1.0);
        const double c = rng.uniform(-10.0, 10.0);
        const Residual a = bellman_residual(smdp, q, r_bar);
        const Residual b = bellman_residual(smdp, q.shifted(c), r_bar);
        CHECK(sup_distance(a.per_pair, b.per_pair) <= 1e-12);
    }
}

TEST_CASE("solve_q examples") {
    const InducedSmdp tri = to_smdp(builtin("Triangle"));
    const OptimalityReport a = solve_q(tri, ReferenceFunction::sum(6));
    CHECK(a.residual_sup <= 1e-9);
    CHECK(std::abs(a.f_value - a.r_star) <= 1e-9);
    CHECK(std::abs(a.r_star) <= 1e-12);
    CHECK(bellman_residual(tri, a.witness_q, a.r_star).sup_norm <= 10 * std::max(a.residual_sup, 1e-15));

    const InducedSmdp sw = to_smdp(builtin("TwoStateSwitch"));
    const OptimalityReport b = solve_q(sw, ReferenceFunction::entry(4, sw.pair(0, 1)));
    CHECK(b.residual_sup <= 1e-9);
    CHECK(std::abs(b.witness_q(0, 1)) <= 1e-9);

    const InducedSmdp zero = to_smdp(transform_rewards(builtin("TwoStateSwitch"), 0.0, 0.0));
    const OptimalityReport c = solve_q(zero, ReferenceFunction::mean(4));
    CHECK(c.witness_q.sup_norm() <= 1e-9);
}

TEST_CASE("shift property of solve_q witnesses") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const TabularMdp m = testing::random_weakly_communicating(4, 3, rng);
        const InducedSmdp smdp = to_smdp(m);
        const OptimalityReport rep = solve_q(smdp, ReferenceFunction::sum(smdp.num_pairs()));
        CHECK(bellman_residual(smdp, rep.witness_q, rep.r_star).sup_norm <= 10 * std::max(rep.residual_sup, 1e-12));
        const double c = rng.uniform(-10.0, 10.0);
        const Residual a = bellman_residual(smdp, rep.witness_q, rep.r_star);
        const Residual b = bellman_residual(smdp, rep.witness_q.shifted(c), rep.r_star);
        CHECK(sup_distance(a.per_pair, b.per_pair) <= 1e-12);
    }
}

TEST_CASE("zero-reward uniqueness check") {
    const InducedSmdp tri = to_smdp(transform_rewards(builtin("Triangle"), 0.0, 0.0));
    CHECK(zero_reward_uniqueness_check(tri, ReferenceFunction::sum(6), 20, 1));
    const InducedSmdp wc = to_smdp(transform_rewards(builtin("WeaklyComm3"), 0.0, 0.0));
    CHECK(zero_reward_uniqueness_check(wc, ReferenceFunction::mean(6), 20, 2));
    try {
        zero_reward_uniqueness_check(to_smdp(builtin("Triangle")), ReferenceFunction::sum(6), 5, 3);
        FAIL("expected PreconditionViolation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PreconditionViolation);
    }
}

TEST_CASE("solution set probe") {
    const InducedSmdp tri = to_smdp(builtin("Triangle"));
    const ProbeReport rep = solution_set_probe(tri, ReferenceFunction::sum(6), 100, 1);
    bool has_q1 = false, has_q2 = false;
    for (const QTable& m : rep.members) {
        has_q1 = has_q1 || sup_distance(m, kTriangleQ1) <= 1e-6;
        has_q2 = has_q2 || sup_distance(m, kTriangleQ2) <= 1e-6;
    }
    CHECK(has_q1);
    CHECK(has_q2);
    double worst = 0.0;
    for (const auto& mp : rep.midpoints) worst = std::max(worst, mp.residual_sup);
    CHECK(worst >= 0.5 - 1e-9);

    const InducedSmdp sw = to_smdp(builtin("TwoStateSwitch"));
    const ProbeReport two = solution_set_probe(sw, ReferenceFunction::sum(4), 50, 2);
    REQUIRE(two.members.size() >= 2);
    bool non_constant = false;
    for (std::size_t i = 0; i < two.members.size(); ++i)
        for (std::size_t j = i + 1; j < two.members.size(); ++j) {
            double lo = 1e300, hi = -1e300;
            for (std::size_t k = 0; k < 4; ++k) {
                const double d = two.members[i][k] - two.members[j][k];
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
            non_constant = non_constant || hi - lo > 1e-4;
        }
    CHECK(non_constant);

    const InducedSmdp single = to_smdp(validate_mdp({{"x"}, {"stay"}, {{0, 0, 0, 5.0, 1.0}}}));
    CHECK(solution_set_probe(single, ReferenceFunction::sum(1), 20, 3).members.size() == 1);
}

TEST_CASE("intra-option residual agrees with the SMDP residual on one-step options") {
    const TabularMdp sw = builtin("TwoStateSwitch");
    const auto opts = one_step_options(sw);
    const QTable q = testing::table(2, 2, {0.3, -1.2, 0.7, 2.0});
    const Residual a = bellman_residual(induce_smdp(sw, opts), q, -0.4);
    const Residual b = intra_option_residual(sw, opts, q, -0.4);
    CHECK(sup_distance(a.per_pair, b.per_pair) <= 1e-12);
}
