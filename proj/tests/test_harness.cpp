#include "avgrl/error.hpp"
#include "avgrl/harness.hpp"

#include "doctest.h"
#include "support.hpp"

#include <cmath>
#include <sstream>

using namespace avgrl;

namespace {

const std::filesystem::path kConfigs = std::filesystem::path(AVGRL_SOURCE_DIR) / "configs";

ExperimentConfig load(const std::string& name) {
    return parse_experiment(read_json(kConfigs / name), kConfigs);
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

} // namespace

TEST_CASE("P1 config parses with the stated hyperparameters") {
    const ExperimentConfig c = load("p1_differential_q.json");
    CHECK(c.model == "TwoStateSwitch");
    CHECK(c.learner.algorithm == Algorithm::DifferentialQ);
    CHECK(c.learner.r_bar0 == -3.0);
    CHECK(c.learner.eta == 1.0);
    CHECK(c.learner.alpha.c == 0.1);
    CHECK(c.steps == 1000);
    CHECK(c.runs == 10);
    CHECK(c.record_every == 10);
    const ExperimentConfig again = parse_experiment(experiment_to_json(c));
    CHECK(experiment_to_json(again) == experiment_to_json(c));
}

TEST_CASE("invalid experiment configs") {
    ExperimentConfig c = load("p1_differential_q.json");
    c.steps = 0;
    try {
        prepare_experiment(c);
        FAIL("expected ConfigInvalid");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConfigInvalid);
    }
    ExperimentConfig rvi = load("p1_differential_q.json");
    rvi.learner.algorithm = Algorithm::RviQ;
    CHECK_THROWS_AS(prepare_experiment(rvi), Error);
    ExperimentConfig bad_row = load("p1_differential_q.json");
    bad_row.behavior = {{0.8, 0.3}};
    CHECK_THROWS_AS(prepare_experiment(bad_row), Error);
    CHECK_THROWS_AS(parse_algorithm("sarsa"), Error);
}

TEST_CASE("P1 runs: logging shape, metadata and ledger") {
    const Experiment e = prepare_experiment(load("p1_differential_q.json"));
    CHECK(e.behavior_broadcast);
    CHECK(std::abs(e.r_star) < 1e-12);
    const auto logs = run_experiment(e);
    REQUIRE(logs.size() == 10);
    for (const RunLog& log : logs) {
        CHECK(log.records.size() == 100);
        CHECK(log.records.back().step == 1000);
        CHECK(log.metadata.step_size_violates_robbins_monro);
        CHECK(log.metadata.seed == derive_seed(2024, log.run));
        CHECK(log.max_ledger_violation <= 1e-12);
    }
    const std::string csv = to_csv(logs, e.smdp.state_names());
    CHECK(count_lines(csv) == 1 + 10 * 100);
    CHECK(csv.rfind("run,seed,step,r_bar,residual,f_value,maxq_1,maxq_2,rate_1,rate_2\n", 0) == 0);

    for (const ConvergenceRow& row : convergence_report(e, logs))
        if (greedy_policy(logs[row.run].records.back().q) == std::vector<std::size_t>{0, 0}) CHECK(row.rate_gap == 0.0);
}

TEST_CASE("identical config and seed give byte-identical output") {
    ExperimentConfig c = load("p2_rvi_q.json");
    c.runs = 3;
    c.steps = 300;
    const Experiment e = prepare_experiment(c);
    const auto a = run_experiment(e);
    const auto b = run_experiment(e);
    CHECK(to_csv(a, e.smdp.state_names()) == to_csv(b, e.smdp.state_names()));
    CHECK(to_json(a, e.smdp.state_names()) == to_json(b, e.smdp.state_names()));
    const json doc = json::parse(to_json(a, e.smdp.state_names()));
    CHECK(doc.size() == 3);
}

TEST_CASE("empty log list gives a header-only CSV") {
    const std::string csv = to_csv({}, {"1", "2"});
    CHECK(csv == "run,seed,step,r_bar,residual,f_value,maxq_1,maxq_2,rate_1,rate_2\n");
}

TEST_CASE("RVI run pins the reference entry") {
    const Experiment e = prepare_experiment(load("p2_rvi_q.json"));
    const auto logs = run_experiment(e);
    for (const ConvergenceRow& row : convergence_report(e, logs)) {
        CHECK(row.rate_error <= 0.05);
        CHECK_FALSE(row.ledger_violation.has_value());
    }
}

TEST_CASE("weakly communicating runs exclude the transient state from the residual") {
    const Experiment e = prepare_experiment(load("p3_differential_q.json"));
    CHECK(e.residual_mask == std::vector<bool>{false, true, true});
    QTable q(3, 2);
    q(0, 0) = 1e6;
    CHECK(masked_residual(e, q) == masked_residual(e, QTable(3, 2)));
}

TEST_CASE("behavior sampling matches the configured probabilities") {
    const Experiment e = prepare_experiment(load("p1_differential_q.json"));
    Rng rng(derive_seed(5, 0));
    const int n = 10000;
    int dashed = 0;
    for (int i = 0; i < n; ++i) dashed += rng.categorical(e.behavior.row(0)) == 1;
    const double p = 0.2, se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(dashed / static_cast<double>(n) - p) <= 4 * se);
}

TEST_CASE("WeaklyComm3 trajectories never return to state 0") {
    const TabularMdp m = builtin("WeaklyComm3");
    Rng rng(6);
    for (int run = 0; run < 20; ++run) {
        std::size_t s = 0;
        bool entered = false;
        for (int t = 0; t < 2000; ++t) {
            const std::size_t a = rng.uniform() < 0.8 ? 0 : 1;
            s = sample_step(m, s, a, rng).next;
            if (entered) CHECK(s != 0);
            entered = entered || s != 0;
        }
    }
}

TEST_CASE("option learners run through the harness") {
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "avgrl_harness_options";
    std::filesystem::create_directories(dir);
    write_text(dir / "opts.json", R"({"options": [
        {"name": "solid", "policy": [{"s": "1", "a": "solid", "prob": 1}, {"s": "2", "a": "solid", "prob": 1}],
         "termination": [{"s": "1", "beta": 1}, {"s": "2", "beta": 1}]},
        {"name": "home", "policy": [{"s": "1", "a": "dashed", "prob": 1}, {"s": "2", "a": "dashed", "prob": 1}],
         "termination": [{"s": "1", "beta": 1}, {"s": "2", "beta": 0}]},
        {"name": "dashed", "policy": [{"s": "1", "a": "dashed", "prob": 1}, {"s": "2", "a": "dashed", "prob": 1}],
         "termination": [{"s": "1", "beta": 1}, {"s": "2", "beta": 1}]}]})");
    for (const char* algo : {"inter_option_differential_q", "intra_option_differential_q"}) {
        ExperimentConfig c = load("p1_differential_q.json");
        c.options_file = "opts.json";
        c.learner.algorithm = parse_algorithm(algo);
        c.behavior = {{0.6, 0.2, 0.2}};
        c.runs = 2;
        c.steps = 2000;
        c.record_every = 100;
        const json doc = experiment_to_json(c);
        const Experiment e = prepare_experiment(parse_experiment(doc, dir));
        CHECK(e.smdp.num_options() == 3);
        for (const RunLog& log : run_experiment(e)) {
            CHECK(log.max_ledger_violation <= 1e-10);
            CHECK(log.records.back().step == 2000);
        }
    }
    std::filesystem::remove_all(dir);
}
