#include "qsat2/constraint_algebra.hpp"

#include <string>

#include "qsat2/errors.hpp"

namespace qsat2 {

ProductConstraint ProductConstraint::oriented_from(Vertex from) const {
    if (from == u) return *this;
    if (from == v) return reversed();
    throw UsageError("vertex " + std::to_string(from) + " is not an endpoint of the constraint");
}

const BraConstraint& InducedConstraint::value() const {
    if (!value_) throw UsageError("value() on a zero induced constraint");
    return *value_;
}

GaussianRational singlet_contraction(const BraState& b, const BraState& g) {
    return b.c0() * g.c1() - b.c1() * g.c0();
}

InducedConstraint induce(const BraConstraint& c1, const BraConstraint& c2) {
    if (c1.v != c2.u) {
        throw UsageError("induce: constraints do not share a middle vertex (" + std::to_string(c1.v) + " vs " +
                         std::to_string(c2.u) + ")");
    }
    if (singlet_contraction(c1.right, c2.left).is_zero()) return InducedConstraint::zero();
    return InducedConstraint::product({c1.u, c2.v, c1.left, c2.right});
}

InducedConstraint induce(const InducedConstraint& c1, const BraConstraint& c2) {
    if (c1.is_zero()) return c1;
    return induce(c1.value(), c2);
}

InducedConstraint induce(const BraConstraint& c1, const InducedConstraint& c2) {
    if (c2.is_zero()) return c2;
    return induce(c1, c2.value());
}

std::optional<ProductConstraint> induce(const ProductConstraint& c1, const ProductConstraint& c2) {
    if (c1.v != c2.u) {
        throw UsageError("induce: constraints do not share a middle vertex (" + std::to_string(c1.v) + " vs " +
                         std::to_string(c2.u) + ")");
    }
    if (c1.right == c2.left) return std::nullopt;
    return ProductConstraint{c1.u, c2.v, c1.left, c2.right};
}

BraConstraint realize(const ProductConstraint& c, std::span<const BraState> factors) {
    if (c.left >= factors.size() || c.right >= factors.size()) throw UsageError("factor index out of range");
    return {c.u, c.v, factors[c.left], factors[c.right]};
}

namespace {

template <typename C>
void check_alignment(std::span<const Vertex> path, std::span<const C> constraints) {
    if (path.size() < 2 || constraints.size() + 1 != path.size()) {
        throw UsageError("chain: path of " + std::to_string(path.size()) + " vertices needs " +
                         std::to_string(path.empty() ? 0 : path.size() - 1) + " constraints, got " +
                         std::to_string(constraints.size()));
    }
    for (std::size_t k = 0; k < constraints.size(); ++k) {
        if (constraints[k].u != path[k] || constraints[k].v != path[k + 1]) {
            throw UsageError("chain: constraint " + std::to_string(k) + " is not oriented along the path");
        }
    }
}

}  // namespace

InducedConstraint chain_constraint(std::span<const Vertex> path, std::span<const BraConstraint> constraints) {
    check_alignment(path, constraints);
    InducedConstraint acc = InducedConstraint::product(constraints[0]);
    for (std::size_t k = 1; k < constraints.size() && !acc.is_zero(); ++k) acc = induce(acc, constraints[k]);
    return acc;
}

std::optional<ProductConstraint> chain_constraint(std::span<const Vertex> path,
                                                  std::span<const ProductConstraint> constraints) {
    check_alignment(path, constraints);
    std::optional<ProductConstraint> acc = constraints[0];
    for (std::size_t k = 1; k < constraints.size() && acc; ++k) acc = induce(*acc, constraints[k]);
    return acc;
}

}  // namespace qsat2
