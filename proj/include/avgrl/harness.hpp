#pragma once

#include "avgrl/io.hpp"
#include "avgrl/learners.hpp"
#include "avgrl/mdp.hpp"
#include "avgrl/options.hpp"
#include "avgrl/qtable.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace avgrl {

enum class Algorithm { DifferentialQ, RviQ, InterOptionDifferentialQ, IntraOptionDifferentialQ };

const char* to_string(Algorithm algorithm) noexcept;
Algorithm parse_algorithm(const std::string& name);

/// True for the learners that maintain a reward-rate estimate tied to the
/// table by r_bar - r_bar0 = eta (sum q - sum q0).
constexpr bool is_differential(Algorithm a) noexcept { return a != Algorithm::RviQ; }

struct LearnerConfig {
    Algorithm algorithm = Algorithm::DifferentialQ;
    double eta = 1.0;
    /// Reference function document: {"kind": "entry", "pair": [s, a]},
    /// {"kind": "weighted", "weights": [...]}, {"kind": "sum"} or {"kind": "mean"}.
    /// Defaults to "sum" for reporting when absent.
    std::optional<json> f;
    StepSizeSchedule alpha = StepSizeSchedule::constant(0.1);
    StepSizeSchedule beta = StepSizeSchedule::constant(0.1);
    double q0 = 0.0;
    double r_bar0 = 0.0;
};

/**
 * One experiment: a model (built-in name or file), an optional options
 * file for the option learners, the learner, and a behaviour policy whose
 * rows are distributions over actions (or options). A single behaviour row
 * is applied in every state.
 */
struct ExperimentConfig {
    std::string model;
    std::optional<std::string> options_file;
    LearnerConfig learner;
    std::vector<std::vector<double>> behavior;
    json start_state = 0; // name or index
    std::uint64_t steps = 1000;
    std::uint64_t runs = 10;
    std::uint64_t record_every = 10;
    std::uint64_t seed = 0;
    double tolerance = 0.05;
};

/// Parses an experiment document; relative file references resolve against `base_dir`.
ExperimentConfig parse_experiment(const json& doc, const std::filesystem::path& base_dir = {});
json experiment_to_json(const ExperimentConfig& config);

/// Everything a run needs, resolved once per experiment.
struct Experiment {
    ExperimentConfig config;
    TabularMdp model;
    std::vector<OptionSpec> options; // empty for primitive-action learners
    InducedSmdp smdp;                // what the learner's table is indexed by
    ReferenceFunction f;
    StationaryPolicy behavior;
    bool behavior_broadcast;
    std::size_t start;
    std::vector<bool> residual_mask; // per state: pairs counted by the residual metric
    double r_star;
    std::string config_hash;
};

/// Validates and resolves a config. Throws ConfigInvalid and model errors.
Experiment prepare_experiment(const ExperimentConfig& config);

struct RunRecord {
    std::uint64_t step;
    QTable q;
    double r_bar;
    double residual;
    double f_value;
    std::vector<double> greedy_rates;
};

struct RunMetadata {
    std::string config_hash;
    std::uint64_t seed;
    bool step_size_violates_robbins_monro;
    bool behavior_broadcast;
    std::vector<std::string> warnings;
};

struct RunLog {
    std::uint64_t run;
    RunMetadata metadata;
    std::vector<RunRecord> records;
    /// max over steps of |(r_bar_t - r_bar_0) - eta (sum q_t - sum q_0)|; 0 for RVI.
    double max_ledger_violation;
};

/// Bellman residual sup-norm at r_* restricted to the experiment's residual mask.
double masked_residual(const Experiment& experiment, const QTable& q);

std::vector<RunLog> run_experiment(const Experiment& experiment);
std::vector<RunLog> run_experiment(const ExperimentConfig& config);

struct ConvergenceRow {
    std::uint64_t run;
    double final_residual;
    double rate_error; // |f(q) - r_*| for RVI, |r_bar - r_*| otherwise
    double rate_gap;   // max_s |r(greedy(q), s) - r_*|
    std::optional<double> ledger_violation;
};

std::vector<ConvergenceRow> convergence_report(const Experiment& experiment, const std::vector<RunLog>& logs);

enum class OutputFormat { Csv, Json };

/// CSV columns: run,seed,step,r_bar,residual,f_value, then maxq_<state> and
/// rate_<state> for each state in order. One row per recorded step per run.
std::string to_csv(const std::vector<RunLog>& logs, const std::vector<std::string>& state_names);
/// One object per run with per-metric arrays and full q tables.
std::string to_json(const std::vector<RunLog>& logs, const std::vector<std::string>& state_names);

void emit(const std::vector<RunLog>& logs, const std::vector<std::string>& state_names, OutputFormat format,
          const std::filesystem::path& path);

} // namespace avgrl
