#include "qsat2/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qsat2/errors.hpp"

namespace qsat2 {

DistributionFunctionals functionals(std::span<const mpq_class> q) {
    DistributionFunctionals r;
    r.norm2 = r.norm3 = r.norm4 = r.norm_inf = 0;
    for (const auto& x : q) {
        const mpq_class x2 = x * x;
        r.norm2 += x2;
        r.norm3 += x2 * x;
        r.norm4 += x2 * x2;
        if (x > r.norm_inf) r.norm_inf = x;
    }
    r.Q2 = 1 - r.norm2;
    r.Qinf = 1 - r.norm_inf;
    r.Qcrux = 1 - 4 * r.norm2 + 2 * r.norm2 * r.norm2 + 4 * r.norm3 - 3 * r.norm4;
    r.Qjunct = r.norm2 - r.norm3;
    return r;
}

DistributionFunctionals functionals(const FactorDistribution& dist) { return functionals(dist.q()); }

mpq_class qcrux_by_summation(std::span<const mpq_class> q) {
    const std::size_t f = q.size();
    mpq_class total = 0;
    for (std::size_t h = 0; h < f; ++h) {
        mpq_class same = 0;  // loop fixing a single state h
        for (std::size_t j = 0; j < f; ++j)
            for (std::size_t k = 0; k < f; ++k)
                if (j != h && k != h) same += q[j] * q[k];
        mpq_class split = 0;  // loop offering {h, i}
        for (std::size_t i = 0; i < f; ++i) {
            if (i == h) continue;
            mpq_class rest = 0;
            for (std::size_t j = 0; j < f; ++j)
                for (std::size_t k = 0; k < f; ++k)
                    if (j != h && j != i && k != h && k != i) rest += q[j] * q[k];
            split += q[i] * rest;
        }
        total += q[h] * (q[h] * same + split);
    }
    return total;
}

double xi(double rho) {
    if (!(rho >= 0.0)) throw UsageError("xi needs a non-negative argument");
    if (rho <= 0.5) return 2.0 * rho;
    // ln x - x = ln(2 rho) - 2 rho, increasing in x on (0, 1)
    const double target = std::log(2.0 * rho) - 2.0 * rho;
    auto g = [&](double x) { return std::log(x) - x - target; };
    double lo = 0.0, hi = 1.0;
    double x = std::min(0.5, 2.0 * rho * std::exp(-2.0 * rho));
    for (int it = 0; it < 400; ++it) {
        const double gx = g(x);
        if (gx == 0.0) break;
        (gx < 0 ? lo : hi) = x;
        const double step = gx / (1.0 / x - 1.0);
        double next = x - step;
        if (!(next > lo && next < hi)) next = lo > 0 ? 0.5 * (lo + hi) : 0.5 * hi;
        if (std::abs(next - x) <= 1e-17 * std::max(1.0, x) || hi - lo <= std::numeric_limits<double>::min()) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

double giant_fraction(double rho) {
    if (rho <= 0.0) return 0.0;
    return 1.0 - xi(rho) / (2.0 * rho);
}

double residual_density(double gamma, double Qinf) {
    if (!(gamma > 0.0) || !(Qinf > 0.0 && Qinf <= 1.0))
        throw UsageError("residual density needs gamma > 0 and 0 < Qinf <= 1");
    // Below the giant component xi = 2 gamma Qinf and the expression collapses to gamma.
    if (gamma * Qinf <= 0.5) return gamma;
    const double x = xi(gamma * Qinf);
    return 0.5 * x + (1.0 - Qinf) / (4.0 * gamma * Qinf * Qinf) * x * x;
}

double frozen_core_fraction(double gamma, double Qinf) { return giant_fraction(gamma * Qinf); }

namespace {

mpz_class binomial(const mpz_class& n, std::size_t k) {
    mpz_class r;
    mpz_bin_ui(r.get_mpz_t(), n.get_mpz_t(), k);
    return r;
}

mpz_class falling(std::size_t n, std::size_t k) {
    mpz_class r = 1;
    for (std::size_t t = 0; t < k; ++t) r *= static_cast<unsigned long>(n - t);
    return r;
}

}  // namespace

mpz_class figure_eight_placements(std::size_t n, std::size_t l) {
    // crux, then two cycles through it: ordered vertex sequences modulo
    // direction, modulo the order of the two cycles
    const mpz_class first = falling(n - 1, l - 1);
    const mpz_class second = falling(n - l, l - 1);
    return mpz_class(static_cast<unsigned long>(n)) * first * second / 8;
}

mpq_class expected_figure_eights(std::size_t n, std::size_t m, std::size_t l, const DistributionFunctionals& fn) {
    if (l < 3) throw UsageError("figure-eight cycles need length at least 3");
    if (2 * l - 1 > n) throw UsageError("a figure eight needs 2l-1 vertices");
    const mpz_class pairs = mpz_class(static_cast<unsigned long>(n)) * static_cast<unsigned long>(n - 1) / 2;
    if (mpz_class(static_cast<unsigned long>(m)) > pairs) throw UsageError("m exceeds the number of vertex pairs");
    if (m < 2 * l) return 0;
    // each placement uses 2l distinct edges
    const std::size_t e = 2 * l;
    mpq_class inclusion(binomial(pairs - static_cast<unsigned long>(e), m - e), binomial(pairs, m));
    inclusion.canonicalize();
    mpq_class q2pow = 1;
    for (std::size_t k = 0; k < 2 * l - 2; ++k) q2pow *= fn.Q2;
    mpq_class r = q2pow * fn.Qcrux * mpq_class(figure_eight_placements(n, l)) * inclusion;
    r.canonicalize();
    return r;
}

ThresholdReport thresholds(const FactorDistribution& dist, GraphModel model, std::size_t n, std::optional<double> x) {
    const auto fn = functionals(dist);
    ThresholdReport r;
    r.model = model;
    r.n = n;
    if (sgn(fn.Q2) > 0) {
        mpq_class g = 1 / (2 * fn.Q2);
        g.canonicalize();
        r.gamma_frustrate = g;
    }
    if (model == GraphModel::er) {
        if (x) {
            if (!(*x > 0.0)) throw UsageError("edge density must be positive");
            r.gamma = *x;
            r.decouple_condition = 2.0 * *x * fn.Qinf.get_d() - std::log(2.0 * *x);
        }
        return r;
    }
    r.p_c = model == GraphModel::lat2 ? 0.5 : 0.24881;
    if (model == GraphModel::lat2) r.p_fin = 0.5;
    if (n > 0) r.domino_scale = std::pow(static_cast<double>(n), -1.0 / 7.0);
    if (x) {
        if (!(*x >= 0.0 && *x <= 1.0)) throw UsageError("bond probability must lie in [0,1]");
        r.p = *x;
        r.domino_presence = std::pow(*x, 7);
    }
    return r;
}

}  // namespace qsat2
