#include "qsat2/structure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "qsat2/errors.hpp"
#include "qsat2/scc.hpp"

namespace qsat2 {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

// Implication structure restricted to factors present at each vertex:
// positive node (v, g) "v in the state killed by g", negative node (v, k)
// "v not in the state killed by k". Arcs: pos(v,j) -> neg(v,k) for k != j;
// neg(v,k) -> pos(w, fac_w(e)) for every edge e = vw with fac_v(e) = k.
struct StateGraph {
    std::vector<std::vector<FactorIndex>> present;
    std::vector<std::uint32_t> base;  // first positive id of each vertex
    std::uint32_t positives = 0;
    Digraph graph;

    std::uint32_t slot(Vertex v, FactorIndex h) const {
        const auto& p = present[v];
        const auto it = std::lower_bound(p.begin(), p.end(), h);
        if (it == p.end() || *it != h) return kNone;
        return base[v] + static_cast<std::uint32_t>(it - p.begin());
    }
    std::uint32_t pos(Vertex v, FactorIndex h) const { return slot(v, h); }
    std::uint32_t neg(Vertex v, FactorIndex h) const {
        const auto s = slot(v, h);
        return s == kNone ? kNone : s + positives;
    }
    bool is_pos(std::uint32_t node) const { return node < positives; }
};

StateGraph build_state_graph(const Instance& inst) {
    const Graph& g = inst.graph;
    const std::size_t n = g.vertex_count();
    StateGraph s;
    s.present.resize(n);
    s.base.resize(n + 1, 0);
    for (Vertex v = 0; v < n; ++v) {
        auto& p = s.present[v];
        for (const auto& inc : g.incident(v)) p.push_back(inst.factor_at(inc.edge, v));
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
        s.base[v + 1] = s.base[v] + static_cast<std::uint32_t>(p.size());
    }
    s.positives = s.base[n];
    std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;
    for (Vertex v = 0; v < n; ++v) {
        const auto& p = s.present[v];
        for (std::uint32_t a = 0; a < p.size(); ++a)
            for (std::uint32_t b = 0; b < p.size(); ++b)
                if (a != b) arcs.emplace_back(s.base[v] + a, s.positives + s.base[v] + b);
        for (const auto& inc : g.incident(v)) {
            const std::uint32_t from = s.neg(v, inst.factor_at(inc.edge, v));
            arcs.emplace_back(from, s.pos(inc.neighbor, inst.factor_at(inc.edge, inc.neighbor)));
        }
    }
    s.graph = Digraph::from_arcs(2 * static_cast<std::size_t>(s.positives), arcs);
    return s;
}

std::vector<LoopOptionSet> option_sets(const Instance& inst, const StateGraph& s) {
    const std::size_t n = inst.graph.vertex_count();
    const SccResult scc = strongly_connected_components(s.graph);

    // nodes grouped by component, components visited sinks first
    std::vector<std::uint32_t> start(scc.count + 1, 0), order(s.graph.size());
    for (auto c : scc.component) ++start[c + 1];
    std::partial_sum(start.begin(), start.end(), start.begin());
    {
        std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
        for (std::uint32_t v = 0; v < s.graph.size(); ++v) order[fill[scc.component[v]]++] = v;
    }

    std::vector<LoopOptionSet> out;
    std::vector<std::uint64_t> reach(scc.count);
    Vertex first_vertex = 0;
    for (std::uint32_t lo = 0; lo < s.positives; lo += 64) {
        const std::uint32_t hi = std::min<std::uint32_t>(lo + 64, s.positives);
        for (std::uint32_t c = 0; c < scc.count; ++c) {
            std::uint64_t bits = 0;
            for (std::uint32_t k = start[c]; k < start[c + 1]; ++k) {
                const std::uint32_t v = order[k];
                if (v >= lo && v < hi) bits |= std::uint64_t{1} << (v - lo);
                for (std::uint32_t w : s.graph.out(v))
                    if (scc.component[w] != c) bits |= reach[scc.component[w]];
            }
            reach[c] = bits;
        }
        while (first_vertex < n && s.base[first_vertex + 1] <= lo) ++first_vertex;
        for (Vertex x = first_vertex; x < n && s.base[x] < hi; ++x) {
            const auto& p = s.present[x];
            for (std::uint32_t a = 0; a < p.size(); ++a) {
                const std::uint64_t r = reach[scc.component[s.positives + s.base[x] + a]];
                if (r == 0) continue;
                for (std::uint32_t b = 0; b < p.size(); ++b) {
                    const std::uint32_t t = s.base[x] + b;
                    if (t < lo || t >= hi || !((r >> (t - lo)) & 1U)) continue;
                    out.push_back({x, std::min(p[a], p[b]), std::max(p[a], p[b])});
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

std::vector<LoopOptionSet> loop_option_sets(const Instance& inst) {
    inst.validate();
    return option_sets(inst, build_state_graph(inst));
}

std::optional<LoopWalk> find_loop_walk(const Instance& inst, Vertex x, FactorIndex a, FactorIndex b) {
    inst.validate();
    if (x >= inst.graph.vertex_count()) throw UsageError("vertex out of range");
    const StateGraph s = build_state_graph(inst);
    const std::uint32_t source = s.neg(x, a), target = s.pos(x, b);
    if (source == kNone || target == kNone) return std::nullopt;
    std::vector<std::uint32_t> parent(s.graph.size(), kNone);
    std::deque<std::uint32_t> queue{source};
    parent[source] = source;
    while (!queue.empty() && parent[target] == kNone) {
        const std::uint32_t v = queue.front();
        queue.pop_front();
        for (std::uint32_t w : s.graph.out(v)) {
            if (parent[w] != kNone) continue;
            parent[w] = v;
            queue.push_back(w);
        }
    }
    if (parent[target] == kNone) return std::nullopt;

    std::vector<std::uint32_t> nodes;
    for (std::uint32_t v = target; v != source; v = parent[v]) nodes.push_back(v);
    nodes.push_back(source);
    std::reverse(nodes.begin(), nodes.end());

    auto vertex_of = [&](std::uint32_t node) {
        const std::uint32_t slot = s.is_pos(node) ? node : node - s.positives;
        return static_cast<Vertex>(std::upper_bound(s.base.begin(), s.base.end(), slot) - s.base.begin() - 1);
    };
    auto factor_of = [&](std::uint32_t node) {
        const std::uint32_t slot = s.is_pos(node) ? node : node - s.positives;
        const Vertex v = vertex_of(node);
        return s.present[v][slot - s.base[v]];
    };
    LoopWalk walk;
    walk.path.push_back(x);
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        if (s.is_pos(nodes[k])) continue;  // junction step inside one vertex
        const Vertex v = vertex_of(nodes[k]), w = vertex_of(nodes[k + 1]);
        walk.constraints.push_back({v, w, factor_of(nodes[k]), factor_of(nodes[k + 1])});
        walk.path.push_back(w);
    }
    return walk;
}

namespace {

struct Candidate {
    Vertex vertex = 0;
    std::vector<LoopOptionSet> sets;
    std::size_t options = 0;
    std::size_t degree = 0;
};

std::size_t width(const LoopOptionSet& s) { return s.a == s.b ? 1 : 2; }

// Smallest inconsistent subfamily of one vertex's option sets. Sets have at
// most two elements, so pairwise-intersecting families with empty total
// intersection always contain an inconsistent triple.
std::optional<Candidate> inconsistent_family(const std::vector<LoopOptionSet>& sets) {
    std::optional<Candidate> best;
    auto offer = [&](std::vector<LoopOptionSet> family) {
        std::size_t options = 0;
        for (const auto& s : family) options += width(s);
        if (!best || family.size() < best->sets.size() ||
            (family.size() == best->sets.size() && options > best->options)) {
            best = Candidate{family.front().vertex, std::move(family), options, 0};
        }
    };
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (std::size_t j = i + 1; j < sets.size(); ++j)
            if (!sets[j].contains(sets[i].a) && !sets[j].contains(sets[i].b)) offer({sets[i], sets[j]});
    if (best) return best;
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (std::size_t j = i + 1; j < sets.size(); ++j)
            for (std::size_t k = j + 1; k < sets.size(); ++k) {
                bool common = false;
                for (FactorIndex h : {sets[i].a, sets[i].b})
                    common = common || (sets[j].contains(h) && sets[k].contains(h));
                if (!common) offer({sets[i], sets[j], sets[k]});
            }
    return best;
}

}  // namespace

std::optional<FrustrationCertificate> frustration_certificate(const Instance& inst) {
    const SatResult sat = satisfiable(inst);
    if (sat.satisfiable) return std::nullopt;
    FrustrationCertificate cert;
    cert.conflict_variable = sat.conflict_variable;

    const auto loops = loop_option_sets(inst);
    std::optional<Candidate> best;
    for (std::size_t lo = 0; lo < loops.size();) {
        std::size_t hi = lo;
        while (hi < loops.size() && loops[hi].vertex == loops[lo].vertex) ++hi;
        const std::vector<LoopOptionSet> sets(loops.begin() + static_cast<std::ptrdiff_t>(lo),
                                              loops.begin() + static_cast<std::ptrdiff_t>(hi));
        if (auto c = inconsistent_family(sets)) {
            c->degree = inst.graph.degree(c->vertex);
            const bool better = !best || c->sets.size() < best->sets.size() ||
                                (c->sets.size() == best->sets.size() &&
                                 (c->options > best->options ||
                                  (c->options == best->options && c->degree > best->degree)));
            if (better) best = std::move(c);
        }
        lo = hi;
    }
    if (best) {
        cert.loop_based = true;
        cert.vertex = best->vertex;
        cert.sets = std::move(best->sets);
    } else if (sat.conflict_variable) {
        cert.vertex = static_cast<Vertex>(*sat.conflict_variable / inst.f());
    }
    return cert;
}

FixedStates fixed_states(const Instance& inst) { return fixed_states(inst, loop_option_sets(inst)); }

FixedStates fixed_states(const Instance& inst, const std::vector<LoopOptionSet>& loops) {
    if (!satisfiable(inst).satisfiable) throw UsageError("fixed states requested for an unsatisfiable instance");
    const Graph& g = inst.graph;
    FixedStates fs;
    fs.state.assign(g.vertex_count(), kFree);
    std::vector<Vertex> work;

    for (std::size_t lo = 0; lo < loops.size();) {
        const Vertex x = loops[lo].vertex;
        std::vector<FactorIndex> common{loops[lo].a};
        if (loops[lo].b != loops[lo].a) common.push_back(loops[lo].b);
        std::size_t hi = lo + 1;
        for (; hi < loops.size() && loops[hi].vertex == x; ++hi)
            std::erase_if(common, [&](FactorIndex h) { return !loops[hi].contains(h); });
        if (common.size() == 1) {
            fs.state[x] = common.front();
            work.push_back(x);
        }
        lo = hi;
    }
    while (!work.empty()) {
        const Vertex x = work.back();
        work.pop_back();
        for (const auto& inc : g.incident(x)) {
            if (inst.factor_at(inc.edge, x) == fs.state[x]) continue;
            const Vertex y = inc.neighbor;
            if (fs.state[y] != kFree) continue;
            fs.state[y] = inst.factor_at(inc.edge, y);
            work.push_back(y);
        }
    }
    fs.count = static_cast<std::size_t>(
        std::count_if(fs.state.begin(), fs.state.end(), [](FactorIndex h) { return h != kFree; }));
    return fs;
}

const std::vector<Vertex>& FrozenSubgraph::core() const {
    static const std::vector<Vertex> empty;
    return components.empty() ? empty : components.front();
}

FrozenSubgraph frozen_subgraph(const Instance& inst, const FixedStates& fixed) {
    const Graph& g = inst.graph;
    const std::size_t n = g.vertex_count();
    if (fixed.state.size() != n) throw UsageError("fixed-state table does not match the instance");
    FrozenSubgraph out;
    std::vector<Vertex> parent(n);
    std::iota(parent.begin(), parent.end(), 0U);
    auto find = [&](Vertex v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (Vertex x = 0; x < n; ++x) {
        if (!fixed.frozen(x)) continue;
        for (const auto& inc : g.incident(x)) {
            if (inst.factor_at(inc.edge, x) == fixed.state[x]) continue;
            out.arcs.emplace_back(x, inc.neighbor);
            if (fixed.frozen(inc.neighbor)) parent[find(x)] = find(inc.neighbor);
        }
    }
    std::vector<std::uint32_t> index(n, kNone);
    for (Vertex x = 0; x < n; ++x) {
        if (!fixed.frozen(x)) continue;
        const Vertex r = find(x);
        if (index[r] == kNone) {
            index[r] = static_cast<std::uint32_t>(out.components.size());
            out.components.emplace_back();
        }
        out.components[index[r]].push_back(x);
    }
    std::stable_sort(out.components.begin(), out.components.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    return out;
}

std::string to_string(PhaseLabel label) {
    switch (label) {
        case PhaseLabel::frustrated: return "frustrated";
        case PhaseLabel::highly_disconnected: return "highly_disconnected";
        case PhaseLabel::highly_decoupled: return "highly_decoupled";
        case PhaseLabel::unclassified: return "unclassified";
    }
    return "?";
}

std::size_t component_cutoff(std::size_t n, double c) {
    if (n < 2) return 1;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(c * std::log2(static_cast<double>(n)))));
}

Decomposition decouple(const Instance& inst, double c) { return decouple(inst, fixed_states(inst), c); }

Decomposition decouple(const Instance& inst, const FixedStates& fixed, double c) {
    const Graph& g = inst.graph;
    Decomposition d;
    d.cutoff = component_cutoff(g.vertex_count(), c);
    d.original_max = components(g).max_size;
    d.frozen.resize(g.vertex_count());
    std::vector<bool> keep(g.vertex_count());
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        d.frozen[v] = fixed.frozen(v);
        keep[v] = !d.frozen[v];
    }
    auto residual = components(g, keep);
    d.residual = std::move(residual.members);
    d.residual_max = residual.max_size;
    if (d.original_max <= d.cutoff) d.label = PhaseLabel::highly_disconnected;
    else if (d.residual_max <= d.cutoff) d.label = PhaseLabel::highly_decoupled;
    else d.label = PhaseLabel::unclassified;
    return d;
}

StructureReport analyze_structure(const Instance& inst, double c, bool with_certificate) {
    inst.validate();
    StructureReport r;
    r.components = components(inst.graph);
    r.sat = satisfiable(inst);
    const std::size_t n = inst.graph.vertex_count();
    if (!r.sat.satisfiable) {
        if (with_certificate) r.certificate = frustration_certificate(inst);
        else r.certificate = FrustrationCertificate{false, 0, {}, r.sat.conflict_variable};
        r.fixed.state.assign(n, kFree);
        r.decomposition.cutoff = component_cutoff(n, c);
        r.decomposition.original_max = r.components.max_size;
        r.decomposition.label = PhaseLabel::frustrated;
        return r;
    }
    const auto loops = loop_option_sets(inst);
    r.loop_set_count = loops.size();
    r.fixed = fixed_states(inst, loops);
    r.frozen = frozen_subgraph(inst, r.fixed);
    r.decomposition = decouple(inst, r.fixed, c);
    return r;
}

bool is_frustrated_figure_eight(const Instance& inst, const FigureEight& fig) {
    std::vector<Vertex> verts{fig.crux};
    for (const auto* cycle : {&fig.first, &fig.second})
        for (Vertex v : *cycle)
            if (v != fig.crux) verts.push_back(v);
    auto local = [&](Vertex v) {
        return static_cast<Vertex>(std::find(verts.begin(), verts.end(), v) - verts.begin());
    };
    std::vector<std::pair<Edge, EdgeFactors>> rows;
    for (const auto* cycle : {&fig.first, &fig.second}) {
        for (std::size_t k = 0; k < cycle->size(); ++k) {
            const Vertex a = (*cycle)[k], b = (*cycle)[(k + 1) % cycle->size()];
            const auto e = inst.graph.find_edge(a, b);
            if (!e) throw UsageError("figure eight uses an edge missing from the instance");
            const Vertex la = local(a), lb = local(b);
            const Edge le{std::min(la, lb), std::max(la, lb)};
            rows.push_back({le, {inst.factor_at(*e, le.u == la ? a : b), inst.factor_at(*e, le.u == la ? b : a)}});
        }
    }
    std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<Edge> edges;
    std::vector<EdgeFactors> factors;
    for (const auto& [e, f] : rows) {
        edges.push_back(e);
        factors.push_back(f);
    }
    Instance sub{Graph(verts.size(), std::move(edges)), std::move(factors), inst.dist, {}};
    return !satisfiable(sub).satisfiable;
}

}  // namespace qsat2
