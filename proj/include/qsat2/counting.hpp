#pragma once

// Exact ground-space dimensions (#2-QSAT values): per-component kernel rank
// over Q[i] or over prime fields, whole-instance assembly, and a balanced
// product tree over big naturals.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "qsat2/instance.hpp"
#include "qsat2/structure.hpp"

namespace qsat2 {

using BigNat = mpz_class;

BigNat pow2(std::size_t k);

enum class RankMode { exact_rational, modular };

struct RankBackendConfig {
    RankMode mode = RankMode::modular;
    // First modular prime; 0 selects the largest prime below 2^62 that is
    // 1 mod 4. Further verification primes are the next smaller such primes.
    std::uint64_t prime = 0;
    unsigned verification_primes = 2;
    std::size_t max_component_qubits = 16;
    unsigned threads = 1;
};

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n);
// The `count` largest primes p < 2^62 with p = 1 mod 4, descending.
std::vector<std::uint64_t> modular_primes(std::size_t count);
// A square root of -1 modulo p (p prime, p = 1 mod 4).
std::uint64_t sqrt_minus_one(std::uint64_t p);

// A one- or two-qubit covector constraint inside a k-qubit register, acting
// as identity on the remaining qubits.
struct LocalConstraint {
    std::vector<std::uint32_t> qubits;  // size 1 or 2, distinct
    std::vector<BraState> bras;         // aligned with qubits
};

// 2^k minus the rank of the stacked constraint rows.
BigNat kernel_dimension(std::size_t k, std::span<const LocalConstraint> constraints,
                        const RankBackendConfig& cfg = {});

// Rank of the stacked rows over one backend, or nullopt when a coefficient
// has a denominator divisible by p. Exposed for backend cross-checks.
std::optional<std::size_t> constraint_rank_mod(std::size_t k, std::span<const LocalConstraint> constraints,
                                               std::uint64_t p);
std::size_t constraint_rank_exact(std::size_t k, std::span<const LocalConstraint> constraints);

// Value of the sub-instance induced on `component`. Throws ComponentCapError
// (reporting `component_id`) above the qubit cap.
BigNat component_value(const Instance& inst, std::span<const Vertex> component, const RankBackendConfig& cfg = {},
                       std::size_t component_id = 0);

struct ComponentValue {
    std::size_t id = 0;
    std::size_t qubits = 0;
    BigNat value;
};

enum class ValueRoute {
    decoupled,  // remove the frozen closure first, count residual components
    raw,        // count the original connected components
};

struct InstanceValue {
    bool frustrated = false;
    BigNat value;
    std::size_t frozen = 0;
    std::vector<ComponentValue> components;
};

// 0 when unsatisfiable. Propagates ComponentCapError naming the component.
InstanceValue instance_value(const Instance& inst, const RankBackendConfig& cfg = {},
                             ValueRoute route = ValueRoute::decoupled);
// Decoupled route reusing a structure report from analyze_structure.
InstanceValue instance_value(const Instance& inst, const StructureReport& report, const RankBackendConfig& cfg = {});

// Exact product, always multiplying the two smallest remaining factors.
BigNat product_tree(std::vector<BigNat> values);

}  // namespace qsat2
