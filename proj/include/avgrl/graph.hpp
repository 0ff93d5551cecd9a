#pragma once

#include <cstddef>
#include <vector>

namespace avgrl {

using Adjacency = std::vector<std::vector<std::size_t>>;

/// Strongly connected components. Component ids are numbered in order of
/// each component's smallest member, so labelling is deterministic.
std::vector<std::size_t> strongly_connected_components(const Adjacency& graph);

/// True iff every node can reach every other node.
bool strongly_connected(const Adjacency& graph);

/// Nodes reachable from `source` (including it).
std::vector<bool> reachable_from(const Adjacency& graph, std::size_t source);

} // namespace avgrl
