#pragma once

// Structural classifiers: alternating-loop option sets, frustration
// certificates, fixed-state propagation, the frozen subgraph/core and the
// decoupled decomposition with its phase label.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsat2/instance.hpp"

namespace qsat2 {

// A closed alternating walk from `vertex` back to itself acts as the
// constraint <alpha_a| (x) <alpha_b| on (vertex, vertex): the vertex must sit
// in the state annihilated by factor a or by factor b. a <= b; a == b when
// the walk fixes a single state.
struct LoopOptionSet {
    Vertex vertex = 0;
    FactorIndex a = 0;
    FactorIndex b = 0;

    bool contains(FactorIndex h) const { return h == a || h == b; }
    friend bool operator==(const LoopOptionSet&, const LoopOptionSet&) = default;
    friend auto operator<=>(const LoopOptionSet&, const LoopOptionSet&) = default;
};

// Every distinct option set, sorted by (vertex, a, b). Computed from
// reachability over (vertex, factor) states rather than explicit walks.
std::vector<LoopOptionSet> loop_option_sets(const Instance& inst);

struct LoopWalk {
    std::vector<Vertex> path;  // starts and ends at the base vertex
    std::vector<ProductConstraint> constraints;  // constraint k oriented (path[k], path[k+1])
};

// A shortest closed alternating walk realizing option set {a, b} at x, with
// the first edge carrying factor a at x and the last carrying factor b.
std::optional<LoopWalk> find_loop_walk(const Instance& inst, Vertex x, FactorIndex a, FactorIndex b);

struct FrustrationCertificate {
    // Loop-based: option sets at `vertex` with empty common intersection.
    bool loop_based = false;
    Vertex vertex = 0;
    std::vector<LoopOptionSet> sets;
    // Variable x_{v,h} (index v*f + h) equivalent to its own negation.
    std::optional<std::uint32_t> conflict_variable;
};

// nullopt iff the instance is satisfiable. The loop certificate uses the
// smallest jointly inconsistent family found at any vertex.
std::optional<FrustrationCertificate> frustration_certificate(const Instance& inst);

// Per vertex the fixed factor state, or kFree when not frozen.
struct FixedStates {
    std::vector<FactorIndex> state;
    std::size_t count = 0;

    bool frozen(Vertex v) const { return state[v] != kFree; }
};

// Least fixpoint of the singleton-intersection rule on loop option sets and
// propagation along edges not satisfied by the neighbour's fixed state.
// Sound, not necessarily complete. Throws UsageError on unsatisfiable input.
FixedStates fixed_states(const Instance& inst);
// Same from precomputed option sets.
FixedStates fixed_states(const Instance& inst, const std::vector<LoopOptionSet>& loops);

struct FrozenSubgraph {
    std::vector<std::pair<Vertex, Vertex>> arcs;  // x -> y
    // Weakly connected components over frozen vertices, largest first
    // (ties by smallest vertex).
    std::vector<std::vector<Vertex>> components;

    const std::vector<Vertex>& core() const;
    std::size_t core_size() const { return components.empty() ? 0 : components.front().size(); }
};

FrozenSubgraph frozen_subgraph(const Instance& inst, const FixedStates& fixed);

enum class PhaseLabel { frustrated, highly_disconnected, highly_decoupled, unclassified };

std::string to_string(PhaseLabel label);

// ceil(c * log2 n), at least 1.
std::size_t component_cutoff(std::size_t n, double c);

struct Decomposition {
    std::vector<bool> frozen;
    std::vector<std::vector<Vertex>> residual;  // components of the unfrozen subgraph
    std::size_t residual_max = 0;
    std::size_t original_max = 0;
    std::size_t cutoff = 0;
    PhaseLabel label = PhaseLabel::unclassified;
};

// Throws UsageError on unsatisfiable input.
Decomposition decouple(const Instance& inst, double c = 3.0);
Decomposition decouple(const Instance& inst, const FixedStates& fixed, double c = 3.0);

// Everything the analyze report and the sweep need, computed once.
struct StructureReport {
    ComponentReport components;
    SatResult sat;
    std::optional<FrustrationCertificate> certificate;  // set iff unsatisfiable
    FixedStates fixed;
    FrozenSubgraph frozen;
    Decomposition decomposition;
    std::size_t loop_set_count = 0;
};

// `with_certificate` false skips the loop computation on unsatisfiable input.
StructureReport analyze_structure(const Instance& inst, double c = 3.0, bool with_certificate = true);

// Sub-instance on the figure eight's edges is unsatisfiable.
bool is_frustrated_figure_eight(const Instance& inst, const FigureEight& fig);

}  // namespace qsat2
