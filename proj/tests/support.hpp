#pragma once

// Test helpers and reference oracles. The oracles deliberately share no code
// with the library beyond its data types: dense linear algebra over a small
// prime field, brute-force enumeration and textbook series.

#include <cstdint>
#include <tuple>
#include <vector>

#include <gmpxx.h>

#include "qsat2/instance.hpp"

namespace qsat2::test {

// (u, v, factor at u, factor at v), zero-based.
using EdgeSpec = std::tuple<Vertex, Vertex, FactorIndex, FactorIndex>;

Instance make_instance(std::size_t n, const FactorDistribution& dist, const std::vector<EdgeSpec>& edges);
Instance make_instance(std::size_t n, std::size_t f, const std::vector<EdgeSpec>& edges);

// Arithmetic in GF(p), p = 998244353 (1 mod 4), with i mapped to a fixed
// square root of -1.
namespace gf {
inline constexpr std::uint64_t kP = 998244353ULL;
std::uint64_t mul(std::uint64_t a, std::uint64_t b);
std::uint64_t add(std::uint64_t a, std::uint64_t b);
std::uint64_t sub(std::uint64_t a, std::uint64_t b);
std::uint64_t pow(std::uint64_t a, std::uint64_t e);
std::uint64_t inv(std::uint64_t a);
std::uint64_t imag_unit();
std::uint64_t from_rational(const mpq_class& q);
std::uint64_t from(const GaussianRational& z);
}  // namespace gf

using DenseVec = std::vector<std::uint64_t>;

// Basis of the common kernel of all constraint operators of the instance,
// each vector of length 2^n (bit v of the index is qubit v). Built by
// intersecting the full space with one constraint kernel at a time.
std::vector<DenseVec> dense_kernel_basis(const Instance& inst);

// Dimension of the kernel, multiplied over connected components so that
// n up to ~12 stays cheap.
mpz_class dense_value(const Instance& inst);

// True iff every kernel vector satisfies <alpha_h|_x (x) 1 = 0.
bool kernel_pinned(const Instance& inst, const std::vector<DenseVec>& basis, Vertex x, FactorIndex h);

// Number of classical assignments satisfying the instance when every factor
// is <0| or <1|: the clause for <a|_u (x) <b|_v forbids (x_u, x_v) = (a, b).
// Requires factors drawn from {(1,0), (0,1)}.
std::uint64_t classical_count(const Instance& inst);

// Product satisfiability by exhaustive search over (f + 1)^n assignments
// (factor kernel state or a free state per qubit).
bool brute_force_satisfiable(const Instance& inst);

// Tree function series sum_k k^(k-1)/k! x^k with x = 2 rho e^{-2 rho},
// summed until the geometric tail bound drops below tol.
double xi_series(double rho, double tol = 1e-15);

// Sum over (h, i, j, k) of q_h q_i q_j q_k with {h, i} and {j, k} disjoint.
mpq_class qcrux_brute(const std::vector<mpq_class>& q);

}  // namespace qsat2::test
