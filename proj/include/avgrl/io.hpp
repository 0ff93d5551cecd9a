#pragma once

#include "avgrl/mdp.hpp"
#include "avgrl/options.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace avgrl {

using nlohmann::json;

/// Reads the whole file; throws IoFailure.
std::string read_text(const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Model document: {"states": [...], "actions": [...], "transitions":
/// [{"s", "a", "next", "reward", "prob"}, ...]}. State and action fields may
/// be names or zero-based indices.
RawModel parse_model(const json& doc);
json model_to_json(const TabularMdp& model);

/// A built-in name or a path to a model document.
TabularMdp load_model(const std::string& ref);

/// {"options": [{"name", "policy": [{"s", "a", "prob"}], "termination": [{"s", "beta"}]}]}
/// Policy entries that are not listed are zero; every state needs a termination entry.
std::vector<OptionSpec> parse_options(const json& doc, const TabularMdp& model);

/// {"policy": [{"s", "a", "prob"}]} or {"deterministic": [choice per state]}.
/// `choices` names the actions (or options) the policy selects among.
StationaryPolicy parse_policy(const json& doc, const std::vector<std::string>& states,
                              const std::vector<std::string>& choices);

/// Resolves a name-or-index field against a list of names.
std::size_t resolve_index(const json& field, const std::vector<std::string>& names, const char* what);

/// Deterministic double formatting used by every text emitter.
std::string format_double(double v);

} // namespace avgrl
