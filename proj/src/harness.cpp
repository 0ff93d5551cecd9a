#include "avgrl/harness.hpp"

#include "avgrl/chain.hpp"
#include "avgrl/error.hpp"
#include "avgrl/graph.hpp"
#include "avgrl/oracle.hpp"
#include "avgrl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>
#include <thread>

namespace avgrl {

const char* to_string(Algorithm algorithm) noexcept {
    switch (algorithm) {
    case Algorithm::DifferentialQ: return "differential_q";
    case Algorithm::RviQ: return "rvi_q";
    case Algorithm::InterOptionDifferentialQ: return "inter_option_differential_q";
    case Algorithm::IntraOptionDifferentialQ: return "intra_option_differential_q";
    }
    return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
    for (auto a : {Algorithm::DifferentialQ, Algorithm::RviQ, Algorithm::InterOptionDifferentialQ,
                   Algorithm::IntraOptionDifferentialQ})
        if (name == to_string(a)) return a;
    throw Error(ErrorKind::ConfigInvalid, "unknown algorithm '" + name + "'");
}

namespace {

StepSizeSchedule parse_schedule(const json& doc) {
    const std::string law = doc.value("law", "constant");
    const double c = doc.value("c", 0.1);
    if (law == "constant") return StepSizeSchedule::constant(c);
    if (law == "harmonic") return StepSizeSchedule::harmonic(c, doc.value("n0", 1.0));
    if (law == "polynomial") return StepSizeSchedule::polynomial(c, doc.value("power", 1.0));
    throw Error(ErrorKind::ConfigInvalid, "unknown step-size law '" + law + "'");
}

json schedule_to_json(const StepSizeSchedule& s) {
    switch (s.law) {
    case StepSizeSchedule::Law::Constant: return {{"law", "constant"}, {"c", s.c}};
    case StepSizeSchedule::Law::Harmonic: return {{"law", "harmonic"}, {"c", s.c}, {"n0", s.n0}};
    case StepSizeSchedule::Law::Polynomial: return {{"law", "polynomial"}, {"c", s.c}, {"power", s.power}};
    }
    return {};
}

std::string resolve_path(const std::string& ref, const std::filesystem::path& base_dir) {
    const auto names = builtin_names();
    if (std::find(names.begin(), names.end(), ref) != names.end()) return ref;
    const std::filesystem::path p(ref);
    return (p.is_relative() && !base_dir.empty() ? base_dir / p : p).string();
}

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
    if (!doc.contains(key)) return fallback;
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ConfigInvalid, std::string("field '") + key + "': " + e.what());
    }
}

} // namespace

ExperimentConfig parse_experiment(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw Error(ErrorKind::ConfigInvalid, "experiment config must be an object");
    ExperimentConfig config;
    if (!doc.contains("model") || !doc.at("model").is_string())
        throw Error(ErrorKind::ConfigInvalid, "config needs a 'model' string");
    config.model = resolve_path(doc.at("model").get<std::string>(), base_dir);
    if (doc.contains("options")) config.options_file = resolve_path(doc.at("options").get<std::string>(), base_dir);

    const json learner = doc.value("learner", json::object());
    config.learner.algorithm = parse_algorithm(get_or<std::string>(learner, "algorithm", "differential_q"));
    config.learner.eta = get_or(learner, "eta", 1.0);
    if (learner.contains("f")) config.learner.f = learner.at("f");
    if (learner.contains("alpha")) config.learner.alpha = parse_schedule(learner.at("alpha"));
    if (learner.contains("beta")) config.learner.beta = parse_schedule(learner.at("beta"));
    config.learner.q0 = get_or(learner, "q0", 0.0);
    config.learner.r_bar0 = get_or(learner, "r_bar0", 0.0);

    config.behavior = get_or<std::vector<std::vector<double>>>(doc, "behavior", {});
    if (doc.contains("start_state")) config.start_state = doc.at("start_state");
    config.steps = get_or<std::uint64_t>(doc, "steps", config.steps);
    config.runs = get_or<std::uint64_t>(doc, "runs", config.runs);
    config.record_every = get_or<std::uint64_t>(doc, "record_every", config.record_every);
    config.seed = get_or<std::uint64_t>(doc, "seed", config.seed);
    config.tolerance = get_or(doc, "tolerance", config.tolerance);
    return config;
}

json experiment_to_json(const ExperimentConfig& config) {
    json learner{{"algorithm", to_string(config.learner.algorithm)},
                 {"eta", config.learner.eta},
                 {"alpha", schedule_to_json(config.learner.alpha)},
                 {"beta", schedule_to_json(config.learner.beta)},
                 {"q0", config.learner.q0},
                 {"r_bar0", config.learner.r_bar0}};
    if (config.learner.f) learner["f"] = *config.learner.f;
    json doc{{"model", config.model},
             {"learner", learner},
             {"behavior", config.behavior},
             {"start_state", config.start_state},
             {"steps", config.steps},
             {"runs", config.runs},
             {"record_every", config.record_every},
             {"seed", config.seed},
             {"tolerance", config.tolerance}};
    if (config.options_file) doc["options"] = *config.options_file;
    return doc;
}

namespace {

ReferenceFunction resolve_reference(const std::optional<json>& doc, const InducedSmdp& smdp) {
    const std::size_t np = smdp.num_pairs();
    if (!doc) return ReferenceFunction::sum(np);
    const std::string kind = doc->value("kind", "");
    if (kind == "sum") return ReferenceFunction::sum(np);
    if (kind == "mean") return ReferenceFunction::mean(np);
    if (kind == "entry") {
        const json pair = doc->value("pair", json::array());
        if (!pair.is_array() || pair.size() != 2)
            throw Error(ErrorKind::ConfigInvalid, "reference entry needs 'pair': [state, choice]");
        return ReferenceFunction::entry(np, smdp.pair(resolve_index(pair[0], smdp.state_names(), "state"),
                                                      resolve_index(pair[1], smdp.option_names(), "choice")));
    }
    if (kind == "weighted") {
        auto weights = doc->value("weights", std::vector<double>{});
        if (weights.size() != np) throw Error(ErrorKind::ConfigInvalid, "weight count does not match pairs");
        return ReferenceFunction::weighted(std::move(weights));
    }
    throw Error(ErrorKind::ConfigInvalid, "unknown reference kind '" + kind + "'");
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool uses_options(Algorithm a) {
    return a == Algorithm::InterOptionDifferentialQ || a == Algorithm::IntraOptionDifferentialQ;
}

} // namespace

Experiment prepare_experiment(const ExperimentConfig& config) {
    if (config.steps < 1) throw Error(ErrorKind::ConfigInvalid, "steps must be at least 1");
    if (config.runs < 1) throw Error(ErrorKind::ConfigInvalid, "runs must be at least 1");
    if (config.record_every < 1) throw Error(ErrorKind::ConfigInvalid, "record_every must be at least 1");
    if (!(config.tolerance > 0.0)) throw Error(ErrorKind::ConfigInvalid, "tolerance must be positive");

    TabularMdp model = load_model(config.model);
    std::vector<OptionSpec> options;
    if (uses_options(config.learner.algorithm)) {
        options = config.options_file ? parse_options(read_json(*config.options_file), model) : one_step_options(model);
    } else if (config.options_file) {
        throw Error(ErrorKind::ConfigInvalid, "options file given for a primitive-action learner");
    }
    InducedSmdp smdp = options.empty() ? to_smdp(model) : induce_smdp(model, options);
    ReferenceFunction f = resolve_reference(config.learner.f, smdp);
    if (config.learner.algorithm == Algorithm::RviQ && !config.learner.f)
        throw Error(ErrorKind::ConfigInvalid, "RVI Q-learning needs a reference function 'f'");

    const std::size_t ns = smdp.num_states();
    const std::size_t nc = smdp.num_options();
    if (config.behavior.empty()) throw Error(ErrorKind::ConfigInvalid, "behavior policy is missing");
    const bool broadcast = config.behavior.size() == 1 && ns > 1;
    if (!broadcast && config.behavior.size() != ns)
        throw Error(ErrorKind::ConfigInvalid, "behavior needs one row or one row per state");
    std::vector<double> probs;
    for (std::size_t s = 0; s < ns; ++s) {
        const auto& row = config.behavior[broadcast ? 0 : s];
        if (row.size() != nc) throw Error(ErrorKind::ConfigInvalid, "behavior row has the wrong width");
        probs.insert(probs.end(), row.begin(), row.end());
    }
    StationaryPolicy behavior(ns, nc, std::move(probs));
    const std::size_t start = resolve_index(config.start_state, smdp.state_names(), "state");

    const StructureClass structure = classify_structure(smdp);
    if (structure.tag == StructureTag::NotWeaklyCommunicating)
        throw Error(ErrorKind::NotWeaklyCommunicating, "experiment model is not weakly communicating");
    std::vector<bool> mask(ns, false);
    for (std::size_t s : structure.closed_class) mask[s] = true;

    const double r_star = optimal_reward_rate(smdp);
    std::string hash = fnv1a_hex(experiment_to_json(config).dump());
    return {config, std::move(model), std::move(options), std::move(smdp), std::move(f), std::move(behavior),
            broadcast, start, std::move(mask), r_star, std::move(hash)};
}

double masked_residual(const Experiment& e, const QTable& q) {
    const Residual res = bellman_residual(e.smdp, q, e.r_star);
    double sup = 0.0;
    for (std::size_t s = 0; s < q.num_states(); ++s) {
        if (!e.residual_mask[s]) continue;
        for (std::size_t o = 0; o < q.num_choices(); ++o) sup = std::max(sup, std::abs(res.per_pair(s, o)));
    }
    return sup;
}

namespace {

std::vector<std::string> behavior_warnings(const Experiment& e) {
    std::vector<std::string> warnings;
    const std::size_t ns = e.smdp.num_states();
    Adjacency graph(ns);
    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t o = 0; o < e.smdp.num_options(); ++o) {
            if (e.behavior(s, o) <= 0.0) {
                if (e.residual_mask[s])
                    warnings.push_back("pair (" + e.smdp.state_names()[s] + ", " + e.smdp.option_names()[o] +
                                       ") is never selected by the behavior policy");
                continue;
            }
            for (std::size_t t = 0; t < ns; ++t)
                if (e.smdp.kernel()(static_cast<Eigen::Index>(e.smdp.pair(s, o)), static_cast<Eigen::Index>(t)) > 0.0)
                    graph[s].push_back(t);
        }
    const auto reach = reachable_from(graph, e.start);
    for (std::size_t s = 0; s < ns; ++s)
        if (e.residual_mask[s] && !reach[s])
            warnings.push_back("state " + e.smdp.state_names()[s] + " is unreachable under the behavior policy");
    if (e.behavior_broadcast) warnings.push_back("one behavior row applied to every state");
    return warnings;
}

RunRecord make_record(const Experiment& e, std::uint64_t step, const LearnerState& state) {
    const QTable& q = state.core.q;
    const Eigen::VectorXd rates = reward_rate(e.smdp, greedy_stationary(q));
    return {step, q, state.r_bar, masked_residual(e, q), e.f(q), std::vector<double>(rates.begin(), rates.end())};
}

bool terminates(const OptionSpec& option, std::size_t s, Rng& rng) {
    const double beta = option.termination(static_cast<Eigen::Index>(s));
    return beta >= 1.0 || (beta > 0.0 && rng.uniform() < beta);
}

RunLog simulate(const Experiment& e, std::uint64_t run, const std::vector<std::string>& warnings) {
    const ExperimentConfig& cfg = e.config;
    const std::uint64_t seed = derive_seed(cfg.seed, run);
    Rng rng(seed);
    RunLog log{run,
               {e.config_hash, seed, !cfg.learner.alpha.satisfies_robbins_monro(), e.behavior_broadcast, warnings},
               {},
               0.0};

    LearnerState state = make_learner_state(e.smdp.num_states(), e.smdp.num_options(), cfg.learner.q0,
                                            cfg.learner.r_bar0, cfg.learner.eta, cfg.learner.alpha, cfg.learner.beta);
    const double sum0 = state.core.q.sum();
    const double r_bar0 = state.r_bar;
    const bool differential = is_differential(cfg.learner.algorithm);

    std::size_t s = e.start;
    bool running = false;
    std::size_t executing = 0;
    std::vector<double> pi(e.model.num_actions());
    for (std::uint64_t t = 1; t <= cfg.steps; ++t) {
        switch (cfg.learner.algorithm) {
        case Algorithm::DifferentialQ:
        case Algorithm::RviQ: {
            const std::size_t a = rng.categorical(e.behavior.row(s));
            const StepOutcome step = sample_step(e.model, s, a, rng);
            const Experience x{s, a, step.reward, step.next};
            if (cfg.learner.algorithm == Algorithm::DifferentialQ)
                dql_step(state, x);
            else
                rviql_step(state, e.f, x);
            s = step.next;
            break;
        }
        case Algorithm::InterOptionDifferentialQ: {
            const std::size_t o = rng.categorical(e.behavior.row(s));
            const OptionOutcome out = execute_option(e.model, e.options[o], s, rng);
            inter_option_dql_step(state, {s, o, out.reward, static_cast<double>(out.length), out.terminal});
            s = out.terminal;
            break;
        }
        case Algorithm::IntraOptionDifferentialQ: {
            if (!running) {
                executing = rng.categorical(e.behavior.row(s));
                running = true;
            }
            const OptionSpec& option = e.options[executing];
            for (std::size_t a = 0; a < pi.size(); ++a)
                pi[a] = option.policy(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
            const std::size_t a = rng.categorical(pi);
            const StepOutcome step = sample_step(e.model, s, a, rng);
            intra_option_dql_step(state, {s, a, step.reward, step.next}, executing, e.options);
            s = step.next;
            if (terminates(option, s, rng)) running = false;
            break;
        }
        }
        if (differential) {
            const double drift = (state.r_bar - r_bar0) - state.eta * (state.core.q.sum() - sum0);
            log.max_ledger_violation = std::max(log.max_ledger_violation, std::abs(drift));
        }
        if (t % cfg.record_every == 0 || t == cfg.steps) log.records.push_back(make_record(e, t, state));
    }
    return log;
}

} // namespace

std::vector<RunLog> run_experiment(const Experiment& experiment) {
    const auto warnings = behavior_warnings(experiment);
    const std::uint64_t runs = experiment.config.runs;
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), runs));
    std::vector<RunLog> logs(runs);
    if (workers == 1) {
        for (std::uint64_t r = 0; r < runs; ++r) logs[r] = simulate(experiment, r, warnings);
        return logs;
    }
    // strided assignment; each run owns its learner state and generator
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::uint64_t r = w; r < runs; r += workers) logs[r] = simulate(experiment, r, warnings);
        }));
    for (auto& j : jobs) j.get();
    return logs;
}

std::vector<RunLog> run_experiment(const ExperimentConfig& config) { return run_experiment(prepare_experiment(config)); }

std::vector<ConvergenceRow> convergence_report(const Experiment& e, const std::vector<RunLog>& logs) {
    std::vector<ConvergenceRow> rows;
    for (const auto& log : logs) {
        if (log.records.empty()) continue;
        const RunRecord& last = log.records.back();
        const bool differential = is_differential(e.config.learner.algorithm);
        const double estimate = differential ? last.r_bar : last.f_value;
        double gap = 0.0;
        for (double r : last.greedy_rates) gap = std::max(gap, std::abs(r - e.r_star));
        rows.push_back({log.run, last.residual, std::abs(estimate - e.r_star), gap,
                        differential ? std::optional<double>(log.max_ledger_violation) : std::nullopt});
    }
    return rows;
}

std::string to_csv(const std::vector<RunLog>& logs, const std::vector<std::string>& state_names) {
    std::ostringstream out;
    out << "run,seed,step,r_bar,residual,f_value";
    for (const auto& name : state_names) out << ",maxq_" << name;
    for (const auto& name : state_names) out << ",rate_" << name;
    out << '\n';
    for (const auto& log : logs) {
        for (const auto& rec : log.records) {
            out << log.run << ',' << log.metadata.seed << ',' << rec.step << ',' << format_double(rec.r_bar) << ','
                << format_double(rec.residual) << ',' << format_double(rec.f_value);
            for (std::size_t s = 0; s < rec.q.num_states(); ++s) out << ',' << format_double(rec.q.row_max(s));
            for (double r : rec.greedy_rates) out << ',' << format_double(r);
            out << '\n';
        }
    }
    return out.str();
}

std::string to_json(const std::vector<RunLog>& logs, const std::vector<std::string>& state_names) {
    json doc = json::array();
    for (const auto& log : logs) {
        json steps = json::array(), r_bar = json::array(), residual = json::array(), f_value = json::array(),
             q = json::array(), rates = json::array();
        for (const auto& rec : log.records) {
            steps.push_back(rec.step);
            r_bar.push_back(rec.r_bar);
            residual.push_back(rec.residual);
            f_value.push_back(rec.f_value);
            json table = json::array();
            for (std::size_t s = 0; s < rec.q.num_states(); ++s) {
                json row = json::array();
                for (std::size_t o = 0; o < rec.q.num_choices(); ++o) row.push_back(rec.q(s, o));
                table.push_back(row);
            }
            q.push_back(table);
            rates.push_back(rec.greedy_rates);
        }
        doc.push_back({{"run", log.run},
                       {"states", state_names},
                       {"metadata",
                        {{"config_hash", log.metadata.config_hash},
                         {"seed", log.metadata.seed},
                         {"step_size_violates_robbins_monro", log.metadata.step_size_violates_robbins_monro},
                         {"behavior_broadcast", log.metadata.behavior_broadcast},
                         {"warnings", log.metadata.warnings}}},
                       {"max_ledger_violation", log.max_ledger_violation},
                       {"step", steps},
                       {"r_bar", r_bar},
                       {"residual", residual},
                       {"f_value", f_value},
                       {"q", q},
                       {"greedy_rates", rates}});
    }
    return doc.dump(1) + "\n";
}

void emit(const std::vector<RunLog>& logs, const std::vector<std::string>& state_names, OutputFormat format,
          const std::filesystem::path& path) {
    write_text(path, format == OutputFormat::Csv ? to_csv(logs, state_names) : to_json(logs, state_names));
}

} // namespace avgrl
