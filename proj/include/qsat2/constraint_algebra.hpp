#pragma once

// Product two-qubit constraints <a|_u (x) <b|_v and the induction operator
// that contracts two constraints sharing a qubit through the singlet.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qsat2/exactq.hpp"

namespace qsat2 {

using Vertex = std::uint32_t;
// Zero-based index into a factor table. Text formats print it one-based.
using FactorIndex = std::uint32_t;

// Constraint stored by factor index: <alpha_left|_u (x) <alpha_right|_v.
struct ProductConstraint {
    Vertex u = 0;
    Vertex v = 0;
    FactorIndex left = 0;
    FactorIndex right = 0;

    // Same operator written with endpoints swapped.
    ProductConstraint reversed() const { return {v, u, right, left}; }
    // Orientation starting at `from`, which must be an endpoint.
    ProductConstraint oriented_from(Vertex from) const;

    friend bool operator==(const ProductConstraint&, const ProductConstraint&) = default;
};

// Constraint with explicit bras.
struct BraConstraint {
    Vertex u = 0;
    Vertex v = 0;
    BraState left;
    BraState right;

    friend bool operator==(const BraConstraint&, const BraConstraint&) = default;
};

// Result of induction: either the zero operator or a canonical product bra pair.
class InducedConstraint {
public:
    static InducedConstraint zero() { return InducedConstraint(); }
    static InducedConstraint product(BraConstraint c) { return InducedConstraint(std::move(c)); }

    bool is_zero() const noexcept { return !value_.has_value(); }
    const BraConstraint& value() const;

    friend bool operator==(const InducedConstraint&, const InducedConstraint&) = default;

private:
    InducedConstraint() = default;
    explicit InducedConstraint(BraConstraint c) : value_(std::move(c)) {}
    std::optional<BraConstraint> value_;
};

// Scalar <b| (x) <g| applied to the unnormalized singlet |01> - |10>.
GaussianRational singlet_contraction(const BraState& b, const BraState& g);

// c1 on (u,v) * c2 on (v,w) -> constraint on (u,w). Throws UsageError when
// c1.v != c2.u.
InducedConstraint induce(const BraConstraint& c1, const BraConstraint& c2);
// Zero absorbs: either operand Zero gives Zero.
InducedConstraint induce(const InducedConstraint& c1, const BraConstraint& c2);
InducedConstraint induce(const BraConstraint& c1, const InducedConstraint& c2);

// Index-level induction over a table of pairwise non-proportional factors:
// zero iff the meeting factor indices coincide.
std::optional<ProductConstraint> induce(const ProductConstraint& c1, const ProductConstraint& c2);

BraConstraint realize(const ProductConstraint& c, std::span<const BraState> factors);

// Left fold of induce along the walk path[0] .. path[l]; constraint k must be
// oriented (path[k], path[k+1]). Vertices may repeat, so closed walks are
// allowed. Throws UsageError on length or endpoint mismatch.
InducedConstraint chain_constraint(std::span<const Vertex> path, std::span<const BraConstraint> constraints);
std::optional<ProductConstraint> chain_constraint(std::span<const Vertex> path,
                                                  std::span<const ProductConstraint> constraints);

}  // namespace qsat2
