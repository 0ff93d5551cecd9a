// avgrl: command-line front end for the average-reward laboratory.
#include "avgrl/chain.hpp"
#include "avgrl/error.hpp"
#include "avgrl/harness.hpp"
#include "avgrl/io.hpp"
#include "avgrl/oracle.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

using namespace avgrl;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

std::string join_names(const std::vector<std::size_t>& idx, const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < idx.size(); ++i) out += (i ? "," : "") + names[idx[i]];
    return out;
}

// Model for the analysis commands: the base MDP as a one-step SMDP, or the
// SMDP induced by an options file.
InducedSmdp load_smdp(const std::string& model_ref, const std::string& options_file) {
    const TabularMdp model = load_model(model_ref);
    if (options_file.empty()) return to_smdp(model);
    return induce_smdp(model, parse_options(read_json(options_file), model));
}

// "sum", "mean", "entry:<state>,<choice>" (names or indices) or "weights:w0,w1,..."
ReferenceFunction cli_reference(const std::string& spec, const InducedSmdp& smdp) {
    if (spec.rfind("entry:", 0) == 0) {
        const std::string rest = spec.substr(6);
        const auto comma = rest.find(',');
        if (comma == std::string::npos) return parse_reference_function(spec, smdp.num_pairs());
        auto as_field = [](const std::string& text) {
            return !text.empty() && text.find_first_not_of("0123456789") == std::string::npos
                       ? json(std::stoll(text))
                       : json(text);
        };
        const std::size_t s = resolve_index(as_field(rest.substr(0, comma)), smdp.state_names(), "state");
        const std::size_t o = resolve_index(as_field(rest.substr(comma + 1)), smdp.option_names(), "choice");
        return ReferenceFunction::entry(smdp.num_pairs(), smdp.pair(s, o));
    }
    return parse_reference_function(spec, smdp.num_pairs());
}

json table_json(const QTable& q) {
    json rows = json::array();
    for (std::size_t s = 0; s < q.num_states(); ++s) {
        json row = json::array();
        for (std::size_t o = 0; o < q.num_choices(); ++o) row.push_back(q(s, o));
        rows.push_back(row);
    }
    return rows;
}

void cmd_validate(const std::string& file) {
    const TabularMdp model = load_model(file);
    const StructureClass cls = classify_structure(model);
    std::cout << "class=" << to_string(cls.tag) << " transient=[" << join_names(cls.transient, model.state_names())
              << "]\n";
}

void cmd_induce(const std::string& model_ref, const std::string& options_file) {
    const InducedSmdp smdp = load_smdp(model_ref, options_file);
    std::cout << "state,option,exp_reward,exp_length";
    for (const auto& name : smdp.state_names()) std::cout << ",landing_" << name;
    std::cout << '\n';
    for (std::size_t s = 0; s < smdp.num_states(); ++s)
        for (std::size_t o = 0; o < smdp.num_options(); ++o) {
            const auto i = static_cast<Eigen::Index>(smdp.pair(s, o));
            std::cout << smdp.state_names()[s] << ',' << smdp.option_names()[o] << ','
                      << format_double(smdp.exp_reward()(i)) << ',' << format_double(smdp.exp_length()(i));
            for (Eigen::Index t = 0; t < smdp.kernel().cols(); ++t)
                std::cout << ',' << format_double(smdp.kernel()(i, t));
            std::cout << '\n';
        }
}

void cmd_analyze(const std::string& model_ref, const std::string& options_file, const std::string& policy_file) {
    const InducedSmdp smdp = load_smdp(model_ref, options_file);
    const StationaryPolicy policy = parse_policy(read_json(policy_file), smdp.state_names(), smdp.option_names());
    const ChainDecomposition dec = decompose(policy_matrix(smdp, policy).transition);
    const Eigen::VectorXd rate = reward_rate(smdp, policy);
    std::vector<std::string> cls(smdp.num_states(), "transient");
    std::vector<double> stationary(smdp.num_states(), 0.0);
    for (std::size_t c = 0; c < dec.classes.size(); ++c)
        for (std::size_t k = 0; k < dec.classes[c].size(); ++k) {
            cls[dec.classes[c][k]] = std::to_string(c);
            stationary[dec.classes[c][k]] = dec.stationary[c](static_cast<Eigen::Index>(k));
        }
    std::cout << "state,class,stationary,reward_rate\n";
    for (std::size_t s = 0; s < smdp.num_states(); ++s)
        std::cout << smdp.state_names()[s] << ',' << cls[s] << ',' << format_double(stationary[s]) << ','
                  << format_double(rate(static_cast<Eigen::Index>(s))) << '\n';
}

void cmd_solve(const std::string& model_ref, const std::string& options_file, const std::string& f_spec, double tol) {
    const InducedSmdp smdp = load_smdp(model_ref, options_file);
    SolveSettings settings;
    settings.tol = tol;
    const OptimalityReport report = solve_q(smdp, cli_reference(f_spec, smdp), settings);
    const json out{{"r_star", report.r_star},
                   {"residual_sup", report.residual_sup},
                   {"f_value", report.f_value},
                   {"iterations", report.iterations},
                   {"states", smdp.state_names()},
                   {"choices", smdp.option_names()},
                   {"witness_q", table_json(report.witness_q)}};
    std::cout << out.dump() << '\n';
}

void cmd_probe(const std::string& model_ref, const std::string& options_file, const std::string& f_spec,
               std::size_t samples, std::uint64_t seed) {
    const InducedSmdp smdp = load_smdp(model_ref, options_file);
    const ProbeReport report = solution_set_probe(smdp, cli_reference(f_spec, smdp), samples, seed);
    std::cout << "member,state,choice,q\n";
    for (std::size_t m = 0; m < report.members.size(); ++m)
        for (std::size_t s = 0; s < smdp.num_states(); ++s)
            for (std::size_t o = 0; o < smdp.num_options(); ++o)
                std::cout << m << ',' << smdp.state_names()[s] << ',' << smdp.option_names()[o] << ','
                          << format_double(report.members[m](s, o)) << '\n';
    std::cout << "\nfirst,second,midpoint_residual\n";
    for (const auto& mid : report.midpoints)
        std::cout << mid.first << ',' << mid.second << ',' << format_double(mid.residual_sup) << '\n';
}

void cmd_run(const std::string& config_file, const std::string& out_dir, const std::string& format,
             std::optional<std::uint64_t> seed) {
    ExperimentConfig config = parse_experiment(read_json(config_file), std::filesystem::path(config_file).parent_path());
    if (seed) config.seed = *seed;
    const Experiment experiment = prepare_experiment(config);
    const auto logs = run_experiment(experiment);

    std::filesystem::create_directories(out_dir);
    const bool csv = format == "csv";
    const auto path = std::filesystem::path(out_dir) / (csv ? "runs.csv" : "runs.json");
    emit(logs, experiment.smdp.state_names(), csv ? OutputFormat::Csv : OutputFormat::Json, path);

    std::cout << "run,final_residual,rate_error,rate_gap,ledger_violation\n";
    for (const auto& row : convergence_report(experiment, logs))
        std::cout << row.run << ',' << format_double(row.final_residual) << ',' << format_double(row.rate_error) << ','
                  << format_double(row.rate_gap) << ','
                  << (row.ledger_violation ? format_double(*row.ledger_violation) : std::string("")) << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tabular average-reward learning laboratory"};
    app.require_subcommand(1);

    std::string file, model_ref, options_file, policy_file, f_spec = "sum", out_dir = ".", format = "csv";
    double tol = 1e-9;
    std::size_t samples = 50;
    std::uint64_t probe_seed = 0;
    std::optional<std::uint64_t> run_seed;

    auto* validate = app.add_subcommand("validate", "Validate a model (file or built-in name) and print its structure class");
    validate->add_option("model", file, "Model file or built-in name")->required();

    auto* induce = app.add_subcommand("induce", "Print the SMDP induced by an option set as CSV");
    induce->add_option("mdp", model_ref, "Built-in name or model file")->required();
    induce->add_option("options", options_file, "Options file")->required();

    auto* analyze = app.add_subcommand("analyze", "Chain analysis of a stationary policy");
    analyze->add_option("mdp", model_ref, "Built-in name or model file")->required();
    analyze->add_option("--policy", policy_file, "Policy file")->required();
    analyze->add_option("--options", options_file, "Options file (policy then selects options)");

    auto* solve = app.add_subcommand("solve", "Compute r_* and one pinned solution of the optimality equation");
    solve->add_option("mdp", model_ref, "Built-in name or model file")->required();
    solve->add_option("--options", options_file, "Options file");
    solve->add_option("--f", f_spec, "Reference function: sum | mean | entry:<state>,<choice> | weights:w0,...");
    solve->add_option("--tol", tol, "Residual tolerance");

    auto* probe = app.add_subcommand("probe", "Sample distinct solution-set members and midpoint residuals");
    probe->add_option("mdp", model_ref, "Built-in name or model file")->required();
    probe->add_option("--options", options_file, "Options file");
    probe->add_option("--f", f_spec, "Reference function");
    probe->add_option("--samples", samples, "Random starts");
    probe->add_option("--seed", probe_seed, "Random seed");

    auto* run = app.add_subcommand("run", "Run a learning experiment");
    run->add_option("config", file, "Experiment config (JSON)")->required();
    run->add_option("--out-dir", out_dir, "Output directory");
    run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--seed", run_seed, "Override the master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*validate) cmd_validate(file);
        if (*induce) cmd_induce(model_ref, options_file);
        if (*analyze) cmd_analyze(model_ref, options_file, policy_file);
        if (*solve) cmd_solve(model_ref, options_file, f_spec, tol);
        if (*probe) cmd_probe(model_ref, options_file, f_spec, samples, probe_seed);
        if (*run) cmd_run(file, out_dir, format, run_seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return is_numerical(e.kind()) ? kExitNumerical : kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}
