#pragma once

// Iterative Tarjan strongly connected components over a compressed
// adjacency (CSR) digraph.

#include <cstdint>
#include <span>
#include <vector>

namespace qsat2 {

struct Digraph {
    std::vector<std::uint32_t> offsets{0};
    std::vector<std::uint32_t> targets;

    std::size_t size() const { return offsets.size() - 1; }
    std::span<const std::uint32_t> out(std::uint32_t v) const {
        return {targets.data() + offsets[v], targets.data() + offsets[v + 1]};
    }

    // Builds from (source, target) arcs over `nodes` vertices.
    static Digraph from_arcs(std::size_t nodes, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& arcs);
};

struct SccResult {
    // Component id per node. Ids follow completion order, so every arc goes
    // from a component to one with an id no larger (sinks come first).
    std::vector<std::uint32_t> component;
    std::uint32_t count = 0;
};

SccResult strongly_connected_components(const Digraph& g);

}  // namespace qsat2
