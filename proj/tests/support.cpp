#include "support.hpp"

#include <cmath>
#include <stdexcept>

#include "qsat2/graph.hpp"

namespace qsat2::test {

Instance make_instance(std::size_t n, const FactorDistribution& dist, const std::vector<EdgeSpec>& edges) {
    std::vector<Edge> list;
    for (const auto& [u, v, h, j] : edges) list.push_back({u, v});
    Instance inst;
    inst.graph = Graph(n, list);
    inst.dist = dist;
    inst.factors.resize(edges.size());
    for (const auto& [u, v, h, j] : edges) {
        const auto e = *inst.graph.find_edge(u, v);
        inst.factors[e] = u < v ? EdgeFactors{h, j} : EdgeFactors{j, h};
    }
    inst.validate();
    return inst;
}

Instance make_instance(std::size_t n, std::size_t f, const std::vector<EdgeSpec>& edges) {
    return make_instance(n, FactorDistribution::uniform(f), edges);
}

namespace gf {

std::uint64_t mul(std::uint64_t a, std::uint64_t b) { return a * b % kP; }
std::uint64_t add(std::uint64_t a, std::uint64_t b) { return (a + b) % kP; }
std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return (a + kP - b) % kP; }

std::uint64_t pow(std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    a %= kP;
    for (; e; e >>= 1, a = mul(a, a))
        if (e & 1) r = mul(r, a);
    return r;
}

std::uint64_t inv(std::uint64_t a) {
    if (a % kP == 0) throw std::domain_error("inverse of zero");
    return pow(a, kP - 2);
}

// 3 generates the multiplicative group, so 3^((p-1)/4) has order 4.
std::uint64_t imag_unit() { return pow(3, (kP - 1) / 4); }

std::uint64_t from_rational(const mpq_class& q) {
    const mpz_class num = q.get_num() % mpz_class(static_cast<unsigned long>(kP));
    const mpz_class den = q.get_den() % mpz_class(static_cast<unsigned long>(kP));
    auto to_u64 = [](mpz_class x) {
        if (x < 0) x += static_cast<unsigned long>(kP);
        return static_cast<std::uint64_t>(x.get_ui());
    };
    return mul(to_u64(num), inv(to_u64(den)));
}

std::uint64_t from(const GaussianRational& z) {
    return add(from_rational(z.re()), mul(from_rational(z.im()), imag_unit()));
}

}  // namespace gf

namespace {

struct Pivot {
    DenseVec image;
    DenseVec vec;
    std::size_t col;
};

}  // namespace

std::vector<DenseVec> dense_kernel_basis(const Instance& inst) {
    const std::size_t n = inst.graph.vertex_count();
    if (n > 14) throw std::invalid_argument("dense oracle limited to 14 qubits");
    const std::size_t dim = std::size_t{1} << n;
    std::vector<DenseVec> basis(dim, DenseVec(dim, 0));
    for (std::size_t k = 0; k < dim; ++k) basis[k][k] = 1;

    for (std::size_t e = 0; e < inst.graph.edge_count(); ++e) {
        const Edge& ed = inst.graph.edge(e);
        const BraState& a = inst.dist.factors()[inst.factors[e].at_u];
        const BraState& b = inst.dist.factors()[inst.factors[e].at_v];
        const std::uint64_t coef[2][2] = {{gf::mul(gf::from(a.c0()), gf::from(b.c0())),
                                           gf::mul(gf::from(a.c0()), gf::from(b.c1()))},
                                          {gf::mul(gf::from(a.c1()), gf::from(b.c0())),
                                           gf::mul(gf::from(a.c1()), gf::from(b.c1()))}};
        const std::size_t bu = std::size_t{1} << ed.u, bv = std::size_t{1} << ed.v;
        std::vector<std::size_t> rows;
        for (std::size_t idx = 0; idx < dim; ++idx)
            if (!(idx & bu) && !(idx & bv)) rows.push_back(idx);

        std::vector<Pivot> pivots;
        std::vector<DenseVec> next;
        for (const DenseVec& v : basis) {
            DenseVec image(rows.size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const std::size_t i = rows[r];
                std::uint64_t s = gf::mul(coef[0][0], v[i]);
                s = gf::add(s, gf::mul(coef[1][0], v[i | bu]));
                s = gf::add(s, gf::mul(coef[0][1], v[i | bv]));
                s = gf::add(s, gf::mul(coef[1][1], v[i | bu | bv]));
                image[r] = s;
            }
            DenseVec vec = v;
            for (const Pivot& p : pivots) {
                const std::uint64_t c = image[p.col];
                if (!c) continue;
                for (std::size_t r = 0; r < image.size(); ++r)
                    if (p.image[r]) image[r] = gf::sub(image[r], gf::mul(c, p.image[r]));
                for (std::size_t r = 0; r < dim; ++r)
                    if (p.vec[r]) vec[r] = gf::sub(vec[r], gf::mul(c, p.vec[r]));
            }
            std::size_t col = 0;
            while (col < image.size() && image[col] == 0) ++col;
            if (col == image.size()) {
                next.push_back(std::move(vec));
                continue;
            }
            const std::uint64_t scale = gf::inv(image[col]);
            for (auto& x : image) x = gf::mul(x, scale);
            for (auto& x : vec) x = gf::mul(x, scale);
            pivots.push_back({std::move(image), std::move(vec), col});
        }
        basis = std::move(next);
    }
    return basis;
}

mpz_class dense_value(const Instance& inst) {
    mpz_class value = 1;
    for (const auto& members : components(inst.graph).members) {
        const Instance sub = induced_subinstance(inst, members);
        value *= static_cast<unsigned long>(dense_kernel_basis(sub).size());
    }
    return value;
}

bool kernel_pinned(const Instance& inst, const std::vector<DenseVec>& basis, Vertex x, FactorIndex h) {
    const BraState& a = inst.dist.factors()[h];
    const std::uint64_t a0 = gf::from(a.c0()), a1 = gf::from(a.c1());
    const std::size_t bit = std::size_t{1} << x;
    for (const DenseVec& v : basis)
        for (std::size_t idx = 0; idx < v.size(); ++idx)
            if (!(idx & bit) && gf::add(gf::mul(a0, v[idx]), gf::mul(a1, v[idx | bit])) != 0) return false;
    return true;
}

std::uint64_t classical_count(const Instance& inst) {
    const BraState zero(1, 0), one(0, 1);
    auto bit_of = [&](FactorIndex h) {
        const BraState& b = inst.dist.factors()[h];
        if (b == zero) return 0U;
        if (b == one) return 1U;
        throw std::invalid_argument("classical_count needs diagonal factors");
    };
    const std::size_t n = inst.graph.vertex_count();
    std::uint64_t count = 0;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        bool ok = true;
        for (std::size_t e = 0; ok && e < inst.graph.edge_count(); ++e) {
            const Edge& ed = inst.graph.edge(e);
            ok = !(((x >> ed.u) & 1U) == bit_of(inst.factors[e].at_u) &&
                   ((x >> ed.v) & 1U) == bit_of(inst.factors[e].at_v));
        }
        count += ok ? 1 : 0;
    }
    return count;
}

namespace {

bool search(const Instance& inst, std::vector<FactorIndex>& state, Vertex v) {
    const std::size_t n = inst.graph.vertex_count();
    if (v == n) return true;
    const auto f = static_cast<FactorIndex>(inst.f());
    for (FactorIndex s = 0; s <= f; ++s) {
        state[v] = s;
        bool ok = true;
        for (const auto& inc : inst.graph.incident(v)) {
            if (inc.neighbor > v) continue;
            const auto here = inst.factor_at(inc.edge, v), there = inst.factor_at(inc.edge, inc.neighbor);
            if (state[v] != here && state[inc.neighbor] != there) {
                ok = false;
                break;
            }
        }
        if (ok && search(inst, state, v + 1)) return true;
    }
    return false;
}

}  // namespace

bool brute_force_satisfiable(const Instance& inst) {
    std::vector<FactorIndex> state(inst.graph.vertex_count(), 0);
    return search(inst, state, 0);
}

double xi_series(double rho, double tol) {
    if (rho == 0.0) return 0.0;
    const double x = 2 * rho * std::exp(-2 * rho);
    const double lx = std::log(x);
    const double r = std::exp(1.0) * x;
    double sum = 0.0, carry = 0.0;
    for (long k = 1;; ++k) {
        const double kd = static_cast<double>(k);
        const double term = std::exp((kd - 1) * std::log(kd) - std::lgamma(kd + 1) + kd * lx);
        const double y = term - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        if (r < 1 && term * r / (1 - r) < tol) break;
        if (k > 50'000'000) throw std::runtime_error("xi series did not converge");
    }
    return sum;
}

mpq_class qcrux_brute(const std::vector<mpq_class>& q) {
    const std::size_t f = q.size();
    mpq_class total = 0;
    for (std::size_t h = 0; h < f; ++h)
        for (std::size_t i = 0; i < f; ++i)
            for (std::size_t j = 0; j < f; ++j)
                for (std::size_t k = 0; k < f; ++k)
                    if (j != h && j != i && k != h && k != i) total += q[h] * q[i] * q[j] * q[k];
    return total;
}

}  // namespace qsat2::test
