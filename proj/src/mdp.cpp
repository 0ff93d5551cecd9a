#include "avgrl/mdp.hpp"

#include "avgrl/error.hpp"
#include "avgrl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

namespace avgrl {

double TabularMdp::expected_reward(std::size_t s, std::size_t a) const {
    double total = 0.0;
    for (const auto& t : outcomes(s, a)) total += t.prob * t.reward;
    return total;
}

std::vector<double> TabularMdp::next_state_distribution(std::size_t s, std::size_t a) const {
    std::vector<double> dist(num_states(), 0.0);
    for (const auto& t : outcomes(s, a)) dist[t.next] += t.prob;
    return dist;
}

namespace {

std::size_t find_name(const std::vector<std::string>& names, std::string_view name, const char* what) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
        throw Error(ErrorKind::UnknownName, std::string("no ") + what + " named '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names.begin());
}

} // namespace

std::size_t TabularMdp::state_index(std::string_view name) const {
    return find_name(state_names_, name, "state");
}

std::size_t TabularMdp::action_index(std::string_view name) const {
    return find_name(action_names_, name, "action");
}

TabularMdp validate_mdp(const RawModel& raw) {
    if (raw.states.empty() || raw.actions.empty())
        throw Error(ErrorKind::EmptyModel, "model needs at least one state and one action");

    const std::size_t ns = raw.states.size();
    const std::size_t na = raw.actions.size();

    // (s, a) -> (next, reward) -> prob; std::map gives the sorted normal form
    std::vector<std::map<std::pair<std::size_t, double>, double>> rows(ns * na);
    for (const auto& t : raw.transitions) {
        if (t.s >= ns || t.next >= ns)
            throw Error(ErrorKind::DanglingState, "transition references state index " +
                                                      std::to_string(std::max(t.s, t.next)));
        if (t.a >= na)
            throw Error(ErrorKind::DanglingState, "transition references action index " + std::to_string(t.a));
        if (!std::isfinite(t.prob) || !std::isfinite(t.reward) || t.prob < 0.0)
            throw Error(ErrorKind::NonStochasticRow, "invalid probability or reward in row (" +
                                                         raw.states[t.s] + ", " + raw.actions[t.a] + ")");
        rows[t.s * na + t.a][{t.next, t.reward}] += t.prob;
    }

    TabularMdp model;
    model.state_names_ = raw.states;
    model.action_names_ = raw.actions;
    model.kernel_.resize(ns * na);
    for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t a = 0; a < na; ++a) {
            auto& out = model.kernel_[s * na + a];
            double total = 0.0;
            for (const auto& [key, prob] : rows[s * na + a]) {
                if (prob == 0.0) continue;
                out.push_back({key.first, key.second, prob});
                total += prob;
            }
            if (std::abs(total - 1.0) > kRowSumTolerance)
                throw Error(ErrorKind::NonStochasticRow, "row (" + raw.states[s] + ", " + raw.actions[a] +
                                                             ") sums to " + std::to_string(total));
        }
    }
    return model;
}

RawModel to_raw(const TabularMdp& model) {
    RawModel raw{model.state_names(), model.action_names(), {}};
    for (std::size_t s = 0; s < model.num_states(); ++s)
        for (std::size_t a = 0; a < model.num_actions(); ++a)
            for (const auto& t : model.outcomes(s, a))
                raw.transitions.push_back({s, a, t.next, t.reward, t.prob});
    return raw;
}

TabularMdp transform_rewards(const TabularMdp& model, double scale, double shift) {
    RawModel raw = to_raw(model);
    for (auto& t : raw.transitions) t.reward = scale * t.reward + shift;
    return validate_mdp(raw);
}

namespace {

constexpr std::size_t kSolid = 0;
constexpr std::size_t kDashed = 1;

RawModel two_state_switch() {
    return {{"1", "2"},
            {"solid", "dashed"},
            {{0, kSolid, 0, 0.0, 1.0},
             {0, kDashed, 1, -1.0, 1.0},
             {1, kSolid, 1, 0.0, 1.0},
             {1, kDashed, 0, -1.0, 1.0}}};
}

RawModel triangle() {
    return {{"1", "2", "3"},
            {"solid", "dashed"},
            {{0, kSolid, 0, 0.0, 1.0},
             {0, kDashed, 1, -2.0, 1.0},
             {1, kSolid, 1, 0.0, 1.0},
             {1, kDashed, 2, 0.0, 1.0},
             {2, kSolid, 1, -1.0, 1.0},
             {2, kDashed, 0, 0.0, 1.0}}};
}

RawModel weakly_comm3() {
    RawModel base = two_state_switch();
    RawModel raw{{"0", "1", "2"}, base.actions, {}};
    raw.transitions = {{0, kSolid, 0, -5.0, 0.9},
                       {0, kSolid, 1, -5.0, 0.1},
                       {0, kDashed, 0, -5.0, 0.9},
                       {0, kDashed, 2, -5.0, 0.1}};
    for (auto t : base.transitions) {
        ++t.s;
        ++t.next;
        raw.transitions.push_back(t);
    }
    return raw;
}

} // namespace

std::vector<std::string> builtin_names() { return {"TwoStateSwitch", "Triangle", "WeaklyComm3"}; }

TabularMdp builtin(std::string_view name) {
    if (name == "TwoStateSwitch") return validate_mdp(two_state_switch());
    if (name == "Triangle") return validate_mdp(triangle());
    if (name == "WeaklyComm3") return validate_mdp(weakly_comm3());
    throw Error(ErrorKind::UnknownName, "no built-in model named '" + std::string(name) + "'");
}

const char* to_string(StructureTag tag) noexcept {
    switch (tag) {
    case StructureTag::Communicating: return "Communicating";
    case StructureTag::WeaklyCommunicating: return "WeaklyCommunicating";
    case StructureTag::NotWeaklyCommunicating: return "NotWeaklyCommunicating";
    }
    return "Unknown";
}

std::vector<bool> end_component_states(const SupportGraph& support) {
    const std::size_t n = support.size();
    std::vector<bool> active(n, true);
    std::vector<std::vector<bool>> allowed(n);
    for (std::size_t s = 0; s < n; ++s) allowed[s].assign(support[s].size(), true);

    bool changed = true;
    while (changed) {
        changed = false;
        Adjacency graph(n);
        for (std::size_t s = 0; s < n; ++s) {
            if (!active[s]) continue;
            for (std::size_t a = 0; a < support[s].size(); ++a) {
                if (!allowed[s][a]) continue;
                for (std::size_t next : support[s][a])
                    if (active[next]) graph[s].push_back(next);
            }
        }
        const auto comp = strongly_connected_components(graph);

        // drop choices that can leave the component of their state
        for (std::size_t s = 0; s < n; ++s) {
            if (!active[s]) continue;
            bool any = false;
            for (std::size_t a = 0; a < support[s].size(); ++a) {
                if (!allowed[s][a]) continue;
                const bool stays = std::all_of(support[s][a].begin(), support[s][a].end(), [&](std::size_t next) {
                    return active[next] && comp[next] == comp[s];
                });
                if (!stays) {
                    allowed[s][a] = false;
                    changed = true;
                } else {
                    any = true;
                }
            }
            if (!any) {
                active[s] = false;
                changed = true;
            }
        }
    }
    return active;
}

StructureClass classify_support(const SupportGraph& support) {
    const std::size_t n = support.size();
    Adjacency all(n);
    for (std::size_t s = 0; s < n; ++s) {
        for (const auto& succ : support[s]) all[s].insert(all[s].end(), succ.begin(), succ.end());
        std::sort(all[s].begin(), all[s].end());
        all[s].erase(std::unique(all[s].begin(), all[s].end()), all[s].end());
    }

    StructureClass result{StructureTag::NotWeaklyCommunicating, {}, {}};
    if (strongly_connected(all)) {
        result.tag = StructureTag::Communicating;
        result.closed_class.resize(n);
        std::iota(result.closed_class.begin(), result.closed_class.end(), std::size_t{0});
        return result;
    }

    const auto in_ec = end_component_states(support);
    for (std::size_t s = 0; s < n; ++s) (in_ec[s] ? result.closed_class : result.transient).push_back(s);

    const auto comp = strongly_connected_components(all);
    const bool single = !result.closed_class.empty() &&
                        std::all_of(result.closed_class.begin(), result.closed_class.end(), [&](std::size_t s) {
                            return comp[s] == comp[result.closed_class.front()];
                        });
    if (single) result.tag = StructureTag::WeaklyCommunicating;
    return result;
}

StructureClass classify_structure(const TabularMdp& model) {
    SupportGraph support(model.num_states());
    for (std::size_t s = 0; s < model.num_states(); ++s) {
        support[s].resize(model.num_actions());
        for (std::size_t a = 0; a < model.num_actions(); ++a) {
            auto& succ = support[s][a];
            for (const auto& t : model.outcomes(s, a)) succ.push_back(t.next);
            succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
        }
    }
    return classify_support(support);
}

StationaryPolicy::StationaryPolicy(std::size_t num_states, std::size_t num_actions, std::vector<double> probs)
    : states_(num_states), actions_(num_actions), probs_(std::move(probs)) {
    if (states_ == 0 || actions_ == 0 || probs_.size() != states_ * actions_)
        throw Error(ErrorKind::ConfigInvalid, "policy table has wrong shape");
    for (std::size_t s = 0; s < states_; ++s) {
        double total = 0.0;
        for (std::size_t a = 0; a < actions_; ++a) {
            const double p = probs_[s * actions_ + a];
            if (!(p >= 0.0)) throw Error(ErrorKind::NonStochasticRow, "negative policy probability");
            total += p;
        }
        if (std::abs(total - 1.0) > kRowSumTolerance)
            throw Error(ErrorKind::NonStochasticRow, "policy row " + std::to_string(s) + " sums to " +
                                                         std::to_string(total));
    }
}

StationaryPolicy StationaryPolicy::deterministic(std::size_t num_actions, const std::vector<std::size_t>& choice) {
    std::vector<double> probs(choice.size() * num_actions, 0.0);
    for (std::size_t s = 0; s < choice.size(); ++s) {
        if (choice[s] >= num_actions) throw Error(ErrorKind::DanglingState, "policy picks unknown action");
        probs[s * num_actions + choice[s]] = 1.0;
    }
    return {choice.size(), num_actions, std::move(probs)};
}

StationaryPolicy StationaryPolicy::uniform(std::size_t num_states, std::size_t num_actions) {
    return {num_states, num_actions, std::vector<double>(num_states * num_actions, 1.0 / num_actions)};
}

} // namespace avgrl
