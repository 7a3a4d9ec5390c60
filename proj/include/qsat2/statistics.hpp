#pragma once

// Closed-form predictors: distribution functionals, the Erdos-Renyi tree
// fraction function xi, residual density after removing the frozen core,
// expected frustrated figure-eight counts and threshold reports.

#include <optional>
#include <span>

#include <gmpxx.h>

#include "qsat2/graph.hpp"
#include "qsat2/instance.hpp"

namespace qsat2 {

struct DistributionFunctionals {
    mpq_class norm2;     // sum q^2
    mpq_class norm3;     // sum q^3
    mpq_class norm4;     // sum q^4
    mpq_class norm_inf;  // max q
    mpq_class Q2;        // 1 - sum q^2: junction survival probability
    mpq_class Qinf;      // 1 - max q
    mpq_class Qcrux;     // crux condition of a frustrated figure eight
    mpq_class Qjunct;    // sum q^2 - sum q^3
};

DistributionFunctionals functionals(std::span<const mpq_class> q);
DistributionFunctionals functionals(const FactorDistribution& dist);

// Crux probability by direct summation over the end factors (h, i) of one
// loop and (j, k) of the other with {h, i} and {j, k} disjoint.
mpq_class qcrux_by_summation(std::span<const mpq_class> q);

// Tree fraction function: 2 rho for rho <= 1/2, otherwise the root in (0,1)
// of xi e^{-xi} = 2 rho e^{-2 rho}. Throws UsageError for negative rho.
double xi(double rho);

// 1 - xi(rho) / (2 rho): giant component fraction of G(n, rho n).
double giant_fraction(double rho);

// Edge density of the graph left after deleting the frozen core.
double residual_density(double gamma, double Qinf);

// Predicted frozen-core fraction 1 - xi(gamma Qinf) / (2 gamma Qinf).
double frozen_core_fraction(double gamma, double Qinf);

// Mean number of frustrated figure eights made of two length-l cycles in a
// uniform random graph with n vertices and m edges. Exact rational; 0 when
// m < 2l. Throws UsageError unless l >= 3, 2l - 1 <= n and m <= n(n-1)/2.
mpq_class expected_figure_eights(std::size_t n, std::size_t m, std::size_t l, const DistributionFunctionals& fn);

// Number of figure-eight placements in the complete graph, i.e. the count
// before the edge-inclusion and frustration probabilities.
mpz_class figure_eight_placements(std::size_t n, std::size_t l);

struct ThresholdReport {
    GraphModel model = GraphModel::er;
    std::size_t n = 0;
    mpq_class gamma_disconnect{1, 2};
    std::optional<mpq_class> gamma_frustrate;  // nullopt: unbounded (Q2 = 0)
    std::optional<double> gamma;                // edge density queried
    std::optional<double> decouple_condition;   // 2 gamma Qinf - ln(2 gamma); decoupled when > 1
    std::optional<double> p_c;                  // bond percolation threshold
    std::optional<double> p_fin;                // known only for d = 2
    std::optional<double> domino_scale;         // n^{-1/7}
    std::optional<double> p;                    // bond probability queried
    std::optional<double> domino_presence;      // p^7
};

// `x` is the edge density m/n for er and the bond probability for lattices.
ThresholdReport thresholds(const FactorDistribution& dist, GraphModel model, std::size_t n,
                           std::optional<double> x = std::nullopt);

}  // namespace qsat2
