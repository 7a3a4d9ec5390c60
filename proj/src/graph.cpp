#include "qsat2/graph.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_set>

#include "qsat2/errors.hpp"
#include "qsat2/rng.hpp"

namespace qsat2 {

std::size_t LatticeGeometry::vertex_count() const {
    std::size_t n = 1;
    for (int k = 0; k < dim; ++k) n *= side;
    return n;
}

Vertex LatticeGeometry::id(std::span<const std::uint32_t> c) const {
    if (c.size() != static_cast<std::size_t>(dim)) throw UsageError("coordinate arity does not match lattice dimension");
    std::size_t v = 0;
    for (auto x : c) {
        if (x >= side) throw UsageError("lattice coordinate out of range");
        v = v * side + x;
    }
    return static_cast<Vertex>(v);
}

std::array<std::uint32_t, 3> LatticeGeometry::coords(Vertex v) const {
    std::array<std::uint32_t, 3> c{0, 0, 0};
    for (int k = dim - 1; k >= 0; --k) {
        c[k] = v % side;
        v /= side;
    }
    return c;
}

std::string to_string(GraphModel m) {
    switch (m) {
        case GraphModel::er: return "er";
        case GraphModel::lat2: return "lat2";
        case GraphModel::lat3: return "lat3";
    }
    return "?";
}

GraphModel parse_graph_model(std::string_view s) {
    if (s == "er") return GraphModel::er;
    if (s == "lat2") return GraphModel::lat2;
    if (s == "lat3") return GraphModel::lat3;
    throw ParseError("unknown graph model '" + std::string(s) + "'");
}

Graph::Graph(std::size_t n, std::vector<Edge> edges, std::optional<LatticeGeometry> lattice)
    : n_(n), edges_(std::move(edges)), lattice_(lattice) {
    if (n > std::numeric_limits<Vertex>::max()) throw UsageError("too many vertices");
    if (lattice_ && lattice_->vertex_count() != n) throw UsageError("lattice geometry does not match vertex count");
    for (auto& e : edges_) {
        if (e.u == e.v) throw UsageError("self-loop at vertex " + std::to_string(e.u));
        if (e.u > e.v) std::swap(e.u, e.v);
        if (e.v >= n) throw UsageError("edge endpoint " + std::to_string(e.v) + " out of range");
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) throw UsageError("parallel edge");

    offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
        ++offsets_[e.u + 1];
        ++offsets_[e.v + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    incidence_.resize(2 * edges_.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::uint32_t i = 0; i < edges_.size(); ++i) {
        incidence_[fill[edges_[i].u]++] = {edges_[i].v, i};
        incidence_[fill[edges_[i].v]++] = {edges_[i].u, i};
    }
}

std::optional<std::uint32_t> Graph::find_edge(Vertex a, Vertex b) const {
    if (a >= n_ || b >= n_) return std::nullopt;
    if (degree(b) < degree(a)) std::swap(a, b);
    for (const auto& inc : incident(a))
        if (inc.neighbor == b) return inc.edge;
    return std::nullopt;
}

GraphModel Graph::model() const noexcept {
    if (!lattice_) return GraphModel::er;
    return lattice_->dim == 2 ? GraphModel::lat2 : GraphModel::lat3;
}

Graph sample_er_graph(std::size_t n, std::size_t m, std::uint64_t seed) {
    const std::uint64_t total = n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (m > total) {
        throw UsageError("m=" + std::to_string(m) + " exceeds the " + std::to_string(total) + " possible edges");
    }
    Rng rng(seed);
    std::vector<Edge> edges;
    edges.reserve(m);
    if (4 * static_cast<std::uint64_t>(m) > total) {
        // dense: shuffle prefix of the full pair list
        std::vector<Edge> all;
        all.reserve(total);
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v) all.push_back({u, v});
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t j = k + rng.below(all.size() - k);
            std::swap(all[k], all[j]);
        }
        edges.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m));
    } else {
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(2 * m);
        while (edges.size() < m) {
            auto u = static_cast<Vertex>(rng.below(n));
            auto v = static_cast<Vertex>(rng.below(n));
            if (u == v) continue;
            if (u > v) std::swap(u, v);
            if (seen.insert(static_cast<std::uint64_t>(u) * n + v).second) edges.push_back({u, v});
        }
    }
    return Graph(n, std::move(edges));
}

Graph sample_lattice(int dim, std::uint32_t side, double p, std::uint64_t seed) {
    if (dim != 2 && dim != 3) throw UsageError("lattice dimension must be 2 or 3");
    if (side < 2) throw UsageError("lattice side must be at least 2");
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("bond probability must lie in [0,1]");
    const LatticeGeometry geo{dim, side};
    const std::size_t n = geo.vertex_count();
    Rng rng(seed);
    std::vector<Edge> edges;
    for (Vertex v = 0; v < n; ++v) {
        const auto c = geo.coords(v);
        std::size_t stride = 1;
        for (int axis = dim - 1; axis >= 0; --axis) {
            if (c[axis] + 1 < side && rng.bernoulli(p)) edges.push_back({v, static_cast<Vertex>(v + stride)});
            stride *= side;
        }
    }
    return Graph(n, std::move(edges), geo);
}

std::string to_string(ComponentClass c) {
    switch (c) {
        case ComponentClass::tree: return "tree";
        case ComponentClass::unicyclic: return "unicyclic";
        case ComponentClass::multicyclic: return "multicyclic";
    }
    return "?";
}

std::size_t ComponentReport::multicyclic_count() const {
    return static_cast<std::size_t>(std::count(classes.begin(), classes.end(), ComponentClass::multicyclic));
}

ComponentReport components(const Graph& g) { return components(g, std::vector<bool>(g.vertex_count(), true)); }

ComponentReport components(const Graph& g, const std::vector<bool>& keep) {
    constexpr auto none = std::numeric_limits<std::uint32_t>::max();
    const std::size_t n = g.vertex_count();
    if (keep.size() != n) throw UsageError("vertex mask size mismatch");
    ComponentReport r;
    r.component_of.assign(n, none);
    std::vector<Vertex> stack;
    for (Vertex s = 0; s < n; ++s) {
        if (!keep[s] || r.component_of[s] != none) continue;
        const auto id = static_cast<std::uint32_t>(r.members.size());
        std::vector<Vertex> comp;
        std::size_t degree_sum = 0;
        r.component_of[s] = id;
        stack.push_back(s);
        while (!stack.empty()) {
            const Vertex x = stack.back();
            stack.pop_back();
            comp.push_back(x);
            for (const auto& inc : g.incident(x)) {
                if (!keep[inc.neighbor]) continue;
                ++degree_sum;
                if (r.component_of[inc.neighbor] == none) {
                    r.component_of[inc.neighbor] = id;
                    stack.push_back(inc.neighbor);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        const std::size_t e = degree_sum / 2;
        const auto excess = static_cast<long long>(e) - static_cast<long long>(comp.size());
        r.classes.push_back(excess < 0 ? ComponentClass::tree
                                       : excess == 0 ? ComponentClass::unicyclic : ComponentClass::multicyclic);
        r.edge_counts.push_back(e);
        r.max_size = std::max(r.max_size, comp.size());
        r.members.push_back(std::move(comp));
    }
    return r;
}

std::vector<std::vector<Vertex>> enumerate_cycles(const Graph& g, std::size_t length) {
    std::vector<std::vector<Vertex>> out;
    if (length < 3) return out;
    std::vector<Vertex> path;
    std::vector<bool> on_path(g.vertex_count(), false);
    // depth-first extension from the smallest vertex through larger ones only
    auto extend = [&](auto&& self, Vertex x) -> void {
        if (path.size() == length) {
            if (path[1] < path.back() && g.find_edge(x, path[0])) out.push_back(path);
            return;
        }
        for (const auto& inc : g.incident(x)) {
            const Vertex y = inc.neighbor;
            if (y <= path[0] || on_path[y]) continue;
            on_path[y] = true;
            path.push_back(y);
            self(self, y);
            path.pop_back();
            on_path[y] = false;
        }
    };
    for (Vertex s = 0; s < g.vertex_count(); ++s) {
        path.assign(1, s);
        on_path[s] = true;
        extend(extend, s);
        on_path[s] = false;
    }
    return out;
}

namespace {

std::vector<Vertex> rotate_to(const std::vector<Vertex>& cycle, Vertex start) {
    std::vector<Vertex> r(cycle);
    std::rotate(r.begin(), std::find(r.begin(), r.end(), start), r.end());
    return r;
}

}  // namespace

std::vector<FigureEight> enumerate_figure_eights(const Graph& g, std::size_t length, std::size_t max_length) {
    if (length < 3) throw UsageError("figure-eight cycle length must be at least 3");
    if (length > max_length) {
        throw UsageError("figure-eight length " + std::to_string(length) + " exceeds the enabled maximum " +
                         std::to_string(max_length));
    }
    const auto cycles = enumerate_cycles(g, length);
    std::vector<std::vector<std::uint32_t>> through(g.vertex_count());
    for (std::uint32_t c = 0; c < cycles.size(); ++c)
        for (Vertex v : cycles[c]) through[v].push_back(c);

    std::vector<FigureEight> out;
    for (Vertex x = 0; x < g.vertex_count(); ++x) {
        const auto& cs = through[x];
        for (std::size_t a = 0; a < cs.size(); ++a) {
            for (std::size_t b = a + 1; b < cs.size(); ++b) {
                const auto& c1 = cycles[cs[a]];
                const auto& c2 = cycles[cs[b]];
                std::size_t shared = 0;
                for (Vertex v : c1) shared += std::count(c2.begin(), c2.end(), v);
                if (shared == 1) out.push_back({x, rotate_to(c1, x), rotate_to(c2, x)});
            }
        }
    }
    return out;
}

namespace {

struct Face {
    int axis;  // the second spanning axis
    int sign;  // +1 or -1
};

// Faces containing the edge p -- p + e_axis, each yielding (side vertex at p,
// side vertex at p + e_axis).
template <typename F>
void for_each_domino(const LatticeGeometry& geo, Vertex p, int axis, F&& visit) {
    const auto c = geo.coords(p);
    std::array<std::size_t, 3> stride{};
    std::size_t s = 1;
    for (int k = geo.dim - 1; k >= 0; --k) {
        stride[k] = s;
        s *= geo.side;
    }
    std::vector<Face> faces;
    for (int b = 0; b < geo.dim; ++b) {
        if (b == axis) continue;
        if (c[b] >= 1) faces.push_back({b, -1});
        if (c[b] + 1 < geo.side) faces.push_back({b, +1});
    }
    const Vertex q = static_cast<Vertex>(p + stride[axis]);
    auto shift = [&](Vertex v, const Face& f) {
        return static_cast<Vertex>(f.sign > 0 ? v + stride[f.axis] : v - stride[f.axis]);
    };
    for (std::size_t i = 0; i < faces.size(); ++i)
        for (std::size_t j = i + 1; j < faces.size(); ++j)
            visit(q, shift(p, faces[i]), shift(q, faces[i]), shift(p, faces[j]), shift(q, faces[j]));
}

}  // namespace

std::vector<Domino> enumerate_dominoes(const Graph& g) {
    if (!g.lattice()) throw UsageError("domino enumeration needs a lattice graph");
    const auto& geo = *g.lattice();
    std::vector<Domino> out;
    for (std::uint32_t ei = 0; ei < g.edge_count(); ++ei) {
        const Edge& e = g.edge(ei);
        const auto cu = geo.coords(e.u);
        const auto cv = geo.coords(e.v);
        int axis = 0;
        while (cu[axis] == cv[axis]) ++axis;
        for_each_domino(geo, e.u, axis, [&](Vertex q, Vertex a1, Vertex b1, Vertex a2, Vertex b2) {
            const std::array<std::pair<Vertex, Vertex>, 6> sides{
                {{e.u, a1}, {q, b1}, {a1, b1}, {e.u, a2}, {q, b2}, {a2, b2}}};
            Domino d{e.u, q, {}, {e.u, q, a1, b1, a2, b2}};
            d.edges[0] = ei;
            for (std::size_t k = 0; k < sides.size(); ++k) {
                const auto found = g.find_edge(sides[k].first, sides[k].second);
                if (!found) return;
                d.edges[k + 1] = *found;
            }
            out.push_back(d);
        });
    }
    return out;
}

std::size_t domino_positions(const LatticeGeometry& geo) {
    std::size_t count = 0;
    const std::size_t n = geo.vertex_count();
    for (Vertex p = 0; p < n; ++p) {
        const auto c = geo.coords(p);
        for (int axis = 0; axis < geo.dim; ++axis) {
            if (c[axis] + 1 >= geo.side) continue;
            for_each_domino(geo, p, axis, [&](Vertex, Vertex, Vertex, Vertex, Vertex) { ++count; });
        }
    }
    return count;
}

}  // namespace qsat2
