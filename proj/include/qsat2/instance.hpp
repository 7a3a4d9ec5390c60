#pragma once

// Factor distributions, random instances (unconditional and conditioned on
// staying frustration-free), product-state satisfiability via 2-SAT, and the
// line-oriented instance file format.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "qsat2/constraint_algebra.hpp"
#include "qsat2/graph.hpp"

namespace qsat2 {

// The first f entries of a fixed table of pairwise non-proportional bras:
// (1,0), (0,1), (1,1), (1,-1), (1,i), (1,-i), then (1,t) for
// t = 2, -2, 2i, -2i, 3, ...
std::vector<BraState> default_factors(std::size_t f);

class FactorDistribution {
public:
    // Throws UsageError unless q is a valid probability vector (positive,
    // non-increasing, summing to 1, q_1 < 1 when f > 1) of the same length as
    // factors, and factors are pairwise non-proportional.
    FactorDistribution(std::vector<BraState> factors, std::vector<mpq_class> q);

    static FactorDistribution uniform(std::size_t f);
    // Default factor table with the given weights.
    static FactorDistribution with_weights(std::vector<mpq_class> q);

    std::size_t size() const noexcept { return factors_.size(); }
    const std::vector<BraState>& factors() const noexcept { return factors_; }
    const std::vector<mpq_class>& q() const noexcept { return q_; }

    // Exact draw of a factor index by integer weights over the common
    // denominator of q.
    template <typename R>
    FactorIndex sample(R& rng) const {
        std::uint64_t r = rng.below(denominator_);
        for (FactorIndex h = 0; h + 1 < weights_.size(); ++h) {
            if (r < weights_[h]) return h;
            r -= weights_[h];
        }
        return static_cast<FactorIndex>(weights_.size() - 1);
    }

    friend bool operator==(const FactorDistribution& a, const FactorDistribution& b) {
        return a.factors_ == b.factors_ && a.q_ == b.q_;
    }

private:
    std::vector<BraState> factors_;
    std::vector<mpq_class> q_;
    std::vector<std::uint64_t> weights_;
    std::uint64_t denominator_ = 1;
};

// `uniform` or a comma separated list of rationals such as `1/2,1/4,1/4`.
// With `uniform` the count f is required.
std::vector<mpq_class> parse_q_list(const std::string& text, std::size_t f);

enum class Conditioning { any, frustration_free };

struct Provenance {
    Conditioning cond = Conditioning::any;
    std::uint64_t seed = 0;
    std::uint64_t resamples = 0;
};

// Factor index pair on an edge, aligned with the edge's u < v orientation.
struct EdgeFactors {
    FactorIndex at_u = 0;
    FactorIndex at_v = 0;

    friend bool operator==(const EdgeFactors&, const EdgeFactors&) = default;
};

struct Instance {
    Graph graph;
    std::vector<EdgeFactors> factors;  // one per graph edge
    FactorDistribution dist = FactorDistribution::uniform(1);
    Provenance provenance;

    // Throws UsageError on a size mismatch or out-of-range index.
    void validate() const;

    std::size_t f() const { return dist.size(); }
    // Factor index of edge `e` at its endpoint `x`.
    FactorIndex factor_at(std::uint32_t e, Vertex x) const {
        return graph.edge(e).u == x ? factors[e].at_u : factors[e].at_v;
    }
    ProductConstraint constraint(std::uint32_t e) const {
        const Edge& ed = graph.edge(e);
        return {ed.u, ed.v, factors[e].at_u, factors[e].at_v};
    }
};

// Sub-instance on the given vertices (renumbered in ascending order) with
// every edge whose endpoints both lie in the set.
Instance induced_subinstance(const Instance& inst, std::span<const Vertex> vertices);

// Each edge's pair drawn i.i.d. from q x q.
Instance sample_instance(const Graph& g, const FactorDistribution& dist, std::uint64_t seed);

// Literal numbering used by the satisfiability machinery: variable
// x_{v,h} ("v is in the state annihilated by factor h") has index v*f + h,
// its positive literal is 2*var and the negation 2*var + 1.
struct LiteralCodec {
    std::size_t f = 1;

    std::uint32_t var(Vertex v, FactorIndex h) const { return static_cast<std::uint32_t>(v * f + h); }
    std::uint32_t pos(Vertex v, FactorIndex h) const { return 2 * var(v, h); }
    std::uint32_t neg(Vertex v, FactorIndex h) const { return 2 * var(v, h) + 1; }
    static std::uint32_t negate(std::uint32_t lit) { return lit ^ 1U; }
    static bool is_positive(std::uint32_t lit) { return (lit & 1U) == 0; }
    Vertex vertex(std::uint32_t lit) const { return static_cast<Vertex>((lit >> 1) / f); }
    FactorIndex factor(std::uint32_t lit) const { return static_cast<FactorIndex>((lit >> 1) % f); }
};

// Sentinel for a vertex in a state orthogonal to none of the factors.
inline constexpr FactorIndex kFree = static_cast<FactorIndex>(-1);

struct SatResult {
    bool satisfiable = false;
    // Per vertex: factor index h meaning the state annihilated by factor h,
    // or kFree. Empty when unsatisfiable.
    std::vector<FactorIndex> witness;
    // When unsatisfiable: a variable whose positive and negative literals lie
    // in one strongly connected component of the implication graph.
    std::optional<std::uint32_t> conflict_variable;
};

// Decides whether a product satisfying assignment exists (2-SAT over the
// x_{v,h} encoding, strongly connected components of the implication graph).
SatResult satisfiable(const Instance& inst);

// Plain 2-SAT over an explicit clause list; literals as in LiteralCodec.
class TwoSat {
public:
    explicit TwoSat(std::size_t variables) : adj_(2 * variables) {}
    void add_clause(std::uint32_t a, std::uint32_t b);
    // Assignment per variable, or nullopt. On failure `conflict` (if given)
    // receives a variable in a contradictory component.
    std::optional<std::vector<bool>> solve(std::optional<std::uint32_t>* conflict = nullptr) const;

private:
    std::vector<std::vector<std::uint32_t>> adj_;
};

// Literals entailed by a growing satisfiable 2-CNF over the x_{v,h}
// encoding. Implication arcs from the at-most-one clauses are implicit.
class BackboneTracker {
public:
    BackboneTracker(std::size_t n, std::size_t f);

    // True iff adding clause (a or b) keeps the formula satisfiable.
    bool admits(std::uint32_t a, std::uint32_t b) const { return !(entailed_[a ^ 1U] && entailed_[b ^ 1U]); }
    // Adds the clause; throws UsageError when it would make the formula
    // unsatisfiable.
    void add(std::uint32_t a, std::uint32_t b);

    bool entailed(std::uint32_t lit) const { return entailed_[lit] != 0; }
    const LiteralCodec& codec() const noexcept { return codec_; }

private:
    template <typename Visit>
    void closure(std::uint32_t from, Visit&& visit);
    void entail_closure(std::uint32_t lit);

    LiteralCodec codec_;
    std::vector<std::vector<std::uint32_t>> clause_arcs_;  // neg literal -> pos literals
    std::vector<std::uint8_t> entailed_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
    std::vector<std::uint32_t> stack_;
    std::vector<std::uint32_t> scratch_;
};

// Edges visited in a seed-determined random order; each pair drawn from
// q x q and redrawn while the partial instance would become unsatisfiable.
// Throws ResampleBudgetError when one edge exceeds `budget` redraws.
Instance sample_frustration_free_instance(const Graph& g, const FactorDistribution& dist, std::uint64_t seed,
                                          std::uint64_t budget = 10000);

struct GenerateSpec {
    GraphModel model = GraphModel::er;
    std::size_t n = 0;        // er
    std::size_t m = 0;        // er
    std::uint32_t side = 0;   // lattices
    double p = 0.0;           // lattices
    FactorDistribution dist = FactorDistribution::uniform(1);
    Conditioning cond = Conditioning::any;
    std::uint64_t budget = 10000;
};

// Graph and constraints from independent substreams of `seed`.
Instance generate_instance(const GenerateSpec& spec, std::uint64_t seed);

void write_instance(std::ostream& os, const Instance& inst);
std::string instance_to_string(const Instance& inst);
// Throws ParseError on any malformed or inconsistent input.
Instance read_instance(std::istream& is);
Instance parse_instance(const std::string& text);
Instance load_instance(const std::string& path);
void save_instance(const std::string& path, const Instance& inst);

}  // namespace qsat2
