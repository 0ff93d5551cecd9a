#include "avgrl/graph.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace avgrl {

namespace {

constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();

// Iterative post-order DFS; appends finished nodes to `order`.
void dfs_order(const Adjacency& graph, std::size_t root, std::vector<bool>& seen,
               std::vector<std::size_t>& order) {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    seen[root] = true;
    while (!stack.empty()) {
        auto& [node, edge] = stack.back();
        if (edge < graph[node].size()) {
            const std::size_t next = graph[node][edge++];
            if (!seen[next]) {
                seen[next] = true;
                stack.emplace_back(next, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
}

} // namespace

std::vector<std::size_t> strongly_connected_components(const Adjacency& graph) {
    const std::size_t n = graph.size();
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t v = 0; v < n; ++v)
        if (!seen[v]) dfs_order(graph, v, seen, order);

    Adjacency reversed(n);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t w : graph[v]) reversed[w].push_back(v);

    std::vector<std::size_t> raw(n, kUnset);
    std::size_t count = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (raw[*it] != kUnset) continue;
        std::vector<std::size_t> stack{*it};
        raw[*it] = count;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t w : reversed[v]) {
                if (raw[w] == kUnset) {
                    raw[w] = count;
                    stack.push_back(w);
                }
            }
        }
        ++count;
    }

    // relabel by smallest member
    std::vector<std::size_t> relabel(count, kUnset);
    std::size_t next = 0;
    std::vector<std::size_t> component(n);
    for (std::size_t v = 0; v < n; ++v) {
        if (relabel[raw[v]] == kUnset) relabel[raw[v]] = next++;
        component[v] = relabel[raw[v]];
    }
    return component;
}

bool strongly_connected(const Adjacency& graph) {
    if (graph.empty()) return true;
    const auto comp = strongly_connected_components(graph);
    return std::all_of(comp.begin(), comp.end(), [](std::size_t c) { return c == 0; });
}

std::vector<bool> reachable_from(const Adjacency& graph, std::size_t source) {
    std::vector<bool> seen(graph.size(), false);
    std::vector<std::size_t> stack{source};
    seen[source] = true;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w : graph[v]) {
            if (!seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
        }
    }
    return seen;
}

} // namespace avgrl
