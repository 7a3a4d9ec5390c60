#pragma once

// Interaction graphs: Erdos-Renyi and bond-percolated lattice samplers plus
// the structural analytics the phase classification relies on.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qsat2/constraint_algebra.hpp"

namespace qsat2 {

struct Edge {
    Vertex u = 0;  // u < v
    Vertex v = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Square (d = 2) or cubic (d = 3) lattice of side L, vertex ids row-major:
// (a, b) -> a*L + b and (a, b, c) -> (a*L + b)*L + c.
struct LatticeGeometry {
    int dim = 2;
    std::uint32_t side = 0;

    std::size_t vertex_count() const;
    Vertex id(std::span<const std::uint32_t> coords) const;
    std::array<std::uint32_t, 3> coords(Vertex v) const;
};

enum class GraphModel { er, lat2, lat3 };

std::string to_string(GraphModel m);
GraphModel parse_graph_model(std::string_view s);

struct Incidence {
    Vertex neighbor;
    std::uint32_t edge;
};

// Simple undirected graph. Edges are kept sorted; immutable after construction.
class Graph {
public:
    Graph() = default;
    // Throws UsageError on loops, duplicates or out-of-range endpoints.
    Graph(std::size_t n, std::vector<Edge> edges, std::optional<LatticeGeometry> lattice = std::nullopt);

    std::size_t vertex_count() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Edge& edge(std::size_t i) const { return edges_[i]; }

    std::span<const Incidence> incident(Vertex v) const {
        return {incidence_.data() + offsets_[v], incidence_.data() + offsets_[v + 1]};
    }
    std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

    // Index of edge {a, b}, if present.
    std::optional<std::uint32_t> find_edge(Vertex a, Vertex b) const;

    const std::optional<LatticeGeometry>& lattice() const noexcept { return lattice_; }
    GraphModel model() const noexcept;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Incidence> incidence_;
    std::optional<LatticeGeometry> lattice_;
};

// Uniform labelled graph with exactly m edges. Throws UsageError when
// m > n(n-1)/2.
Graph sample_er_graph(std::size_t n, std::size_t m, std::uint64_t seed);

// Each nearest-neighbour edge present independently with probability p.
Graph sample_lattice(int dim, std::uint32_t side, double p, std::uint64_t seed);

enum class ComponentClass { tree, unicyclic, multicyclic };

std::string to_string(ComponentClass c);

struct ComponentReport {
    // Components ordered by smallest vertex; vertices ascending inside each.
    std::vector<std::vector<Vertex>> members;
    std::vector<std::size_t> edge_counts;
    std::vector<ComponentClass> classes;
    std::vector<std::uint32_t> component_of;  // vertex -> component index
    std::size_t max_size = 0;

    std::size_t count() const { return members.size(); }
    std::size_t multicyclic_count() const;
};

ComponentReport components(const Graph& g);

// Components of the subgraph induced by the vertices with keep[v] true;
// vertices not kept are absent from the report (component_of = UINT32_MAX).
ComponentReport components(const Graph& g, const std::vector<bool>& keep);

struct FigureEight {
    Vertex crux;
    // Cycle vertex sequences starting at the crux (closing edge implied).
    std::vector<Vertex> first;
    std::vector<Vertex> second;
};

// Simple cycles of the given length, each as a vertex sequence starting at
// its smallest vertex and reported once.
std::vector<std::vector<Vertex>> enumerate_cycles(const Graph& g, std::size_t length);

// Unordered pairs of length-l cycles meeting in exactly one vertex. Lengths
// above max_length (default 4) are refused with UsageError.
std::vector<FigureEight> enumerate_figure_eights(const Graph& g, std::size_t length,
                                                 std::size_t max_length = 4);

// Two unit cells sharing one lattice edge. The shared edge joins the two
// centre vertices; `edges` lists all seven edge indices.
struct Domino {
    Vertex centre_a;
    Vertex centre_b;
    std::array<std::uint32_t, 7> edges;
    std::array<Vertex, 6> vertices;
};

// Every domino fully present in g; in 3D both coplanar and right-angle cell
// pairs. Throws UsageError when g carries no lattice geometry.
std::vector<Domino> enumerate_dominoes(const Graph& g);

// Number of domino positions in the complete lattice.
std::size_t domino_positions(const LatticeGeometry& lattice);

}  // namespace qsat2
