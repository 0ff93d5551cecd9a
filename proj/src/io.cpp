#include "avgrl/io.hpp"

#include "avgrl/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace avgrl {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json read_json(const std::filesystem::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ConfigInvalid, path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

std::size_t resolve_index(const json& field, const std::vector<std::string>& names, const char* what) {
    if (field.is_number_integer()) {
        const auto v = field.get<long long>();
        if (v < 0 || static_cast<std::size_t>(v) >= names.size())
            throw Error(ErrorKind::DanglingState, std::string(what) + " index " + std::to_string(v) + " out of range");
        return static_cast<std::size_t>(v);
    }
    if (field.is_string()) {
        const auto name = field.get<std::string>();
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return i;
        throw Error(ErrorKind::DanglingState, std::string("unknown ") + what + " '" + name + "'");
    }
    throw Error(ErrorKind::ConfigInvalid, std::string(what) + " must be a name or an index");
}

namespace {

template <typename T>
T field(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key))
        throw Error(ErrorKind::ConfigInvalid, std::string("missing field '") + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ConfigInvalid, std::string("field '") + key + "': " + e.what());
    }
}

const json& member(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key))
        throw Error(ErrorKind::ConfigInvalid, std::string("missing field '") + key + "'");
    return obj.at(key);
}

} // namespace

RawModel parse_model(const json& doc) {
    RawModel raw;
    raw.states = field<std::vector<std::string>>(doc, "states");
    raw.actions = field<std::vector<std::string>>(doc, "actions");
    const json& transitions = member(doc, "transitions");
    if (!transitions.is_array()) throw Error(ErrorKind::ConfigInvalid, "'transitions' must be a list");
    for (const auto& t : transitions) {
        raw.transitions.push_back({resolve_index(member(t, "s"), raw.states, "state"),
                                   resolve_index(member(t, "a"), raw.actions, "action"),
                                   resolve_index(member(t, "next"), raw.states, "state"), field<double>(t, "reward"),
                                   field<double>(t, "prob")});
    }
    return raw;
}

json model_to_json(const TabularMdp& model) {
    json transitions = json::array();
    for (const auto& t : to_raw(model).transitions)
        transitions.push_back({{"s", model.state_names()[t.s]},
                               {"a", model.action_names()[t.a]},
                               {"next", model.state_names()[t.next]},
                               {"reward", t.reward},
                               {"prob", t.prob}});
    return {{"states", model.state_names()}, {"actions", model.action_names()}, {"transitions", transitions}};
}

TabularMdp load_model(const std::string& ref) {
    for (const auto& name : builtin_names())
        if (ref == name) return builtin(ref);
    if (!std::filesystem::exists(ref))
        throw Error(ErrorKind::UnknownName, "'" + ref + "' is neither a built-in model nor a file");
    return validate_mdp(parse_model(read_json(ref)));
}

std::vector<OptionSpec> parse_options(const json& doc, const TabularMdp& model) {
    const json& list = member(doc, "options");
    if (!list.is_array()) throw Error(ErrorKind::ConfigInvalid, "'options' must be a list");
    const auto ns = static_cast<Eigen::Index>(model.num_states());
    const auto na = static_cast<Eigen::Index>(model.num_actions());
    std::vector<OptionSpec> options;
    for (const auto& entry : list) {
        OptionSpec option{entry.value("name", "o" + std::to_string(options.size())), Eigen::MatrixXd::Zero(ns, na),
                          Eigen::VectorXd::Constant(ns, -1.0)};
        for (const auto& p : member(entry, "policy")) {
            const auto s = static_cast<Eigen::Index>(resolve_index(member(p, "s"), model.state_names(), "state"));
            const auto a = static_cast<Eigen::Index>(resolve_index(member(p, "a"), model.action_names(), "action"));
            option.policy(s, a) += field<double>(p, "prob");
        }
        for (const auto& b : member(entry, "termination")) {
            const auto s = static_cast<Eigen::Index>(resolve_index(member(b, "s"), model.state_names(), "state"));
            option.termination(s) = field<double>(b, "beta");
        }
        for (Eigen::Index s = 0; s < ns; ++s)
            if (option.termination(s) < 0.0)
                throw Error(ErrorKind::ConfigInvalid, "option '" + option.name + "' lacks a termination entry for state " +
                                                          model.state_names()[static_cast<std::size_t>(s)]);
        validate_option(model, option);
        options.push_back(std::move(option));
    }
    if (options.empty()) throw Error(ErrorKind::EmptyModel, "option list is empty");
    return options;
}

StationaryPolicy parse_policy(const json& doc, const std::vector<std::string>& states,
                              const std::vector<std::string>& choices) {
    if (doc.is_object() && doc.contains("deterministic")) {
        const json& list = doc.at("deterministic");
        if (!list.is_array() || list.size() != states.size())
            throw Error(ErrorKind::ConfigInvalid, "'deterministic' needs one entry per state");
        std::vector<std::size_t> choice;
        for (const auto& c : list) choice.push_back(resolve_index(c, choices, "choice"));
        return StationaryPolicy::deterministic(choices.size(), choice);
    }
    std::vector<double> probs(states.size() * choices.size(), 0.0);
    for (const auto& p : member(doc, "policy")) {
        const std::size_t s = resolve_index(member(p, "s"), states, "state");
        const std::size_t a = resolve_index(member(p, "a"), choices, "choice");
        probs[s * choices.size() + a] += field<double>(p, "prob");
    }
    return {states.size(), choices.size(), std::move(probs)};
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace avgrl
