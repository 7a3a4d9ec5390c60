#include "qsat2/scc.hpp"

#include <algorithm>
#include <limits>

namespace qsat2 {

Digraph Digraph::from_arcs(std::size_t nodes, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& arcs) {
    Digraph g;
    g.offsets.assign(nodes + 1, 0);
    for (const auto& [s, t] : arcs) ++g.offsets[s + 1];
    for (std::size_t k = 0; k < nodes; ++k) g.offsets[k + 1] += g.offsets[k];
    g.targets.resize(arcs.size());
    std::vector<std::uint32_t> fill(g.offsets.begin(), g.offsets.end() - 1);
    for (const auto& [s, t] : arcs) g.targets[fill[s]++] = t;
    return g;
}

SccResult strongly_connected_components(const Digraph& g) {
    constexpr auto unvisited = std::numeric_limits<std::uint32_t>::max();
    const auto n = static_cast<std::uint32_t>(g.size());
    SccResult r;
    r.component.assign(n, unvisited);
    std::vector<std::uint32_t> index(n, unvisited), low(n, 0), stack;
    std::vector<bool> on_stack(n, false);
    struct Frame {
        std::uint32_t v;
        std::uint32_t next;  // position in the arc list
    };
    std::vector<Frame> call;
    std::uint32_t counter = 0;

    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        call.push_back({root, g.offsets[root]});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& fr = call.back();
            const std::uint32_t v = fr.v;
            if (fr.next < g.offsets[v + 1]) {
                const std::uint32_t w = g.targets[fr.next++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, g.offsets[w]});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    r.component[w] = r.count;
                } while (w != v);
                ++r.count;
            }
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        }
    }
    return r;
}

}  // namespace qsat2
