#include "qsat2/counting.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "qsat2/errors.hpp"

namespace qsat2 {

BigNat pow2(std::size_t k) {
    BigNat r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, k);
    return r;
}

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    for (; e; e >>= 1) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
    }
    return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::vector<std::uint64_t> modular_primes(std::size_t count) {
    static std::mutex mu;
    static std::vector<u64> cache;
    std::lock_guard lock(mu);
    u64 candidate = cache.empty() ? (u64{1} << 62) - 3 : cache.back() - 4;
    while (cache.size() < count) {
        if (is_prime_u64(candidate)) cache.push_back(candidate);
        candidate -= 4;
    }
    return {cache.begin(), cache.begin() + static_cast<std::ptrdiff_t>(count)};
}

std::uint64_t sqrt_minus_one(std::uint64_t p) {
    if (p % 4 != 1 || !is_prime_u64(p)) throw UsageError("modulus must be a prime congruent to 1 mod 4");
    for (u64 c = 2;; ++c) {
        const u64 t = powmod(c, (p - 1) / 4, p);
        if (mulmod(t, t, p) == p - 1) return t;
    }
}

namespace {

struct ModField {
    using Elem = u64;
    u64 p;
    u64 i_unit;

    explicit ModField(u64 prime) : p(prime), i_unit(sqrt_minus_one(prime)) {}

    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + p - b; }
    Elem mul(Elem a, Elem b) const { return mulmod(a, b, p); }
    Elem inv(Elem a) const { return powmod(a, p - 2, p); }
    bool is_zero(Elem a) const { return a == 0; }

    std::optional<Elem> rational(const mpq_class& q) const {
        const mpz_class pz(static_cast<unsigned long>(p));
        const mpz_class num = ((q.get_num() % pz) + pz) % pz;
        const mpz_class den = q.get_den() % pz;
        if (den == 0) return std::nullopt;
        return mul(num.get_ui(), inv(den.get_ui()));
    }
    std::optional<Elem> from(const GaussianRational& z) const {
        const auto re = rational(z.re()), im = rational(z.im());
        if (!re || !im) return std::nullopt;
        return (*re + mul(*im, i_unit)) % p;
    }
};

struct ExactField {
    using Elem = GaussianRational;

    Elem zero() const { return GaussianRational(0); }
    Elem one() const { return GaussianRational(1); }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem inv(const Elem& a) const { return GaussianRational(1) / a; }
    bool is_zero(const Elem& a) const { return a.is_zero(); }
    std::optional<Elem> from(const GaussianRational& z) const { return z; }
};

// Per-qubit change of ket basis chosen so that the two most frequent bras
// at the qubit become (1,0) and (0,1); remaining bras stay general.
struct Frame {
    std::optional<KetState> e0;
    std::optional<KetState> e1;
};

std::vector<Frame> choose_frames(std::size_t k, std::span<const LocalConstraint> constraints) {
    std::vector<std::vector<std::pair<BraState, std::size_t>>> seen(k);
    for (const auto& c : constraints) {
        for (std::size_t s = 0; s < c.qubits.size(); ++s) {
            auto& list = seen[c.qubits[s]];
            auto it = std::find_if(list.begin(), list.end(), [&](const auto& e) { return e.first == c.bras[s]; });
            if (it == list.end()) list.emplace_back(c.bras[s], 1);
            else ++it->second;
        }
    }
    std::vector<Frame> frames(k);
    const GaussianRational one(1), zero(0);
    for (std::size_t q = 0; q < k; ++q) {
        auto& list = seen[q];
        if (list.empty()) continue;
        std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        const BraState& a = list[0].first;
        frames[q].e1 = kernel_ket(a);
        if (list.size() > 1) frames[q].e0 = kernel_ket(list[1].first);
        else frames[q].e0 = a.c0().is_zero() ? KetState(zero, one) : KetState(one, zero);
    }
    return frames;
}

template <typename F>
struct Row {
    std::vector<std::uint32_t> cols;
    std::vector<typename F::Elem> vals;
};

template <typename F>
std::optional<std::size_t> sparse_rank(const F& field, std::size_t k, std::span<const LocalConstraint> constraints) {
    using Elem = typename F::Elem;
    for (const auto& c : constraints) {
        if (c.qubits.empty() || c.qubits.size() > 2 || c.qubits.size() != c.bras.size())
            throw UsageError("local constraints act on one or two qubits");
        for (auto q : c.qubits)
            if (q >= k) throw UsageError("constraint qubit out of range");
        if (c.qubits.size() == 2 && c.qubits[0] == c.qubits[1]) throw UsageError("constraint qubits must differ");
    }
    if (k >= 32) throw UsageError("register too large for explicit rank computation");
    const std::vector<Frame> frames = choose_frames(k, constraints);

    // transformed coefficient pairs per constraint slot
    struct Local {
        std::vector<std::uint32_t> bits;
        std::vector<std::array<Elem, 2>> coef;
        bool singleton = true;
    };
    std::vector<Local> local;
    local.reserve(constraints.size());
    for (const auto& c : constraints) {
        Local l;
        for (std::size_t s = 0; s < c.qubits.size(); ++s) {
            const Frame& fr = frames[c.qubits[s]];
            const auto c0 = field.from(apply(c.bras[s], *fr.e0));
            const auto c1 = field.from(apply(c.bras[s], *fr.e1));
            if (!c0 || !c1) return std::nullopt;
            l.bits.push_back(c.qubits[s]);
            l.coef.push_back({*c0, *c1});
            if (!field.is_zero(*c0) && !field.is_zero(*c1)) l.singleton = false;
        }
        local.push_back(std::move(l));
    }

    const std::size_t cols = std::size_t{1} << k;
    std::vector<std::uint8_t> covered(cols, 0);
    std::size_t rank = 0;

    // Enumerates columns touched by one constraint: for each assignment of
    // the free bits, the 2^|bits| columns obtained by varying the local bits.
    auto for_each_block = [&](const Local& l, auto&& visit) {
        std::uint32_t mask = 0;
        for (auto b : l.bits) mask |= 1U << b;
        const std::uint32_t free = static_cast<std::uint32_t>(cols - 1) & ~mask;
        std::uint32_t rest = 0;
        do {
            visit(rest);
            rest = (rest - free) & free;
        } while (rest != 0);
    };

    for (const auto& l : local) {
        if (!l.singleton) continue;
        std::uint32_t fixed = 0;
        for (std::size_t s = 0; s < l.bits.size(); ++s)
            if (field.is_zero(l.coef[s][0])) fixed |= 1U << l.bits[s];
        for_each_block(l, [&](std::uint32_t rest) {
            auto& cell = covered[rest | fixed];
            if (!cell) {
                cell = 1;
                ++rank;
            }
        });
    }

    std::vector<Row<F>> rows;
    for (const auto& l : local) {
        if (l.singleton) continue;
        const std::size_t width = std::size_t{1} << l.bits.size();
        for_each_block(l, [&](std::uint32_t rest) {
            Row<F> r;
            for (std::uint32_t a = 0; a < width; ++a) {
                std::uint32_t col = rest;
                Elem v = field.one();
                for (std::size_t s = 0; s < l.bits.size(); ++s) {
                    const std::uint32_t bit = (a >> s) & 1U;
                    col |= bit << l.bits[s];
                    v = field.mul(v, l.coef[s][bit]);
                }
                if (field.is_zero(v) || covered[col]) continue;
                r.cols.push_back(col);
                r.vals.push_back(std::move(v));
            }
            if (r.cols.empty()) return;
            std::vector<std::size_t> idx(r.cols.size());
            for (std::size_t t = 0; t < idx.size(); ++t) idx[t] = t;
            std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return r.cols[x] < r.cols[y]; });
            Row<F> sorted;
            for (auto t : idx) {
                sorted.cols.push_back(r.cols[t]);
                sorted.vals.push_back(r.vals[t]);
            }
            rows.push_back(std::move(sorted));
        });
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.cols.size() < b.cols.size(); });

    // incremental echelon form, pivot rows normalized to a leading 1
    std::vector<std::int32_t> pivot(cols, -1);
    std::vector<Row<F>> basis;
    Row<F> scratch;
    for (auto& r : rows) {
        while (!r.cols.empty()) {
            const std::uint32_t lead = r.cols.front();
            if (pivot[lead] < 0) {
                const Elem s = field.inv(r.vals.front());
                for (auto& v : r.vals) v = field.mul(v, s);
                pivot[lead] = static_cast<std::int32_t>(basis.size());
                basis.push_back(std::move(r));
                ++rank;
                break;
            }
            const Row<F>& p = basis[static_cast<std::size_t>(pivot[lead])];
            const Elem factor = r.vals.front();
            scratch.cols.clear();
            scratch.vals.clear();
            std::size_t x = 1, y = 1;
            while (x < r.cols.size() || y < p.cols.size()) {
                if (y >= p.cols.size() || (x < r.cols.size() && r.cols[x] < p.cols[y])) {
                    scratch.cols.push_back(r.cols[x]);
                    scratch.vals.push_back(std::move(r.vals[x]));
                    ++x;
                } else if (x >= r.cols.size() || p.cols[y] < r.cols[x]) {
                    scratch.cols.push_back(p.cols[y]);
                    scratch.vals.push_back(field.sub(field.zero(), field.mul(factor, p.vals[y])));
                    ++y;
                } else {
                    Elem v = field.sub(r.vals[x], field.mul(factor, p.vals[y]));
                    if (!field.is_zero(v)) {
                        scratch.cols.push_back(r.cols[x]);
                        scratch.vals.push_back(std::move(v));
                    }
                    ++x;
                    ++y;
                }
            }
            std::swap(r, scratch);
        }
    }
    return rank;
}

}  // namespace

std::optional<std::size_t> constraint_rank_mod(std::size_t k, std::span<const LocalConstraint> constraints,
                                               std::uint64_t p) {
    return sparse_rank(ModField(p), k, constraints);
}

std::size_t constraint_rank_exact(std::size_t k, std::span<const LocalConstraint> constraints) {
    return sparse_rank(ExactField{}, k, constraints).value();
}

BigNat kernel_dimension(std::size_t k, std::span<const LocalConstraint> constraints, const RankBackendConfig& cfg) {
    std::optional<std::size_t> rank;
    if (cfg.mode == RankMode::modular) {
        std::vector<u64> primes;
        const unsigned count = std::max(1U, cfg.verification_primes);
        if (cfg.prime != 0) {
            primes.push_back(cfg.prime);
            for (u64 p : modular_primes(count))
                if (primes.size() < count && p != cfg.prime) primes.push_back(p);
        } else {
            primes = modular_primes(count);
        }
        for (u64 p : primes) {
            const auto r = constraint_rank_mod(k, constraints, p);
            if (!r || (rank && *rank != *r)) {
                rank.reset();
                break;
            }
            rank = r;
        }
    }
    if (!rank) rank = constraint_rank_exact(k, constraints);
    return pow2(k) - BigNat(static_cast<unsigned long>(*rank));
}

BigNat component_value(const Instance& inst, std::span<const Vertex> component, const RankBackendConfig& cfg,
                       std::size_t component_id) {
    if (component.size() > cfg.max_component_qubits)
        throw ComponentCapError(component_id, component.size(), cfg.max_component_qubits);
    const Graph& g = inst.graph;
    std::vector<Vertex> sorted(component.begin(), component.end());
    std::sort(sorted.begin(), sorted.end());
    auto local = [&](Vertex v) -> std::optional<std::uint32_t> {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
        if (it == sorted.end() || *it != v) return std::nullopt;
        return static_cast<std::uint32_t>(it - sorted.begin());
    };
    std::vector<LocalConstraint> rows;
    for (Vertex x : sorted) {
        for (const auto& inc : g.incident(x)) {
            if (inc.neighbor < x) continue;
            const auto ly = local(inc.neighbor);
            if (!ly) continue;
            const auto& table = inst.dist.factors();
            rows.push_back({{*local(x), *ly},
                            {table[inst.factor_at(inc.edge, x)], table[inst.factor_at(inc.edge, inc.neighbor)]}});
        }
    }
    return kernel_dimension(sorted.size(), rows, cfg);
}

namespace {

std::vector<ComponentValue> evaluate_components(const Instance& inst, const std::vector<std::vector<Vertex>>& comps,
                                                const RankBackendConfig& cfg) {
    for (std::size_t id = 0; id < comps.size(); ++id)
        if (comps[id].size() > cfg.max_component_qubits)
            throw ComponentCapError(id, comps[id].size(), cfg.max_component_qubits);
    std::vector<ComponentValue> out(comps.size());
    std::vector<std::exception_ptr> errors(comps.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t id; (id = next.fetch_add(1)) < comps.size();) {
            try {
                out[id] = {id, comps[id].size(), component_value(inst, comps[id], cfg, id)};
            } catch (...) {
                errors[id] = std::current_exception();
            }
        }
    };
    const unsigned threads = std::max(1U, std::min<unsigned>(cfg.threads, static_cast<unsigned>(comps.size())));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

InstanceValue assemble(std::vector<ComponentValue> comps, std::size_t frozen) {
    InstanceValue r;
    r.frozen = frozen;
    std::vector<BigNat> values;
    values.reserve(comps.size());
    for (const auto& c : comps) values.push_back(c.value);
    r.value = product_tree(std::move(values));
    r.components = std::move(comps);
    return r;
}

}  // namespace

InstanceValue instance_value(const Instance& inst, const RankBackendConfig& cfg, ValueRoute route) {
    if (route == ValueRoute::decoupled) return instance_value(inst, analyze_structure(inst, 3.0, false), cfg);
    if (!satisfiable(inst).satisfiable) {
        InstanceValue r;
        r.frustrated = true;
        r.value = 0;
        return r;
    }
    return assemble(evaluate_components(inst, components(inst.graph).members, cfg), 0);
}

InstanceValue instance_value(const Instance& inst, const StructureReport& report, const RankBackendConfig& cfg) {
    if (!report.sat.satisfiable) {
        InstanceValue r;
        r.frustrated = true;
        r.value = 0;
        return r;
    }
    return assemble(evaluate_components(inst, report.decomposition.residual, cfg), report.fixed.count);
}

BigNat product_tree(std::vector<BigNat> values) {
    if (values.empty()) return 1;
    auto larger = [](const BigNat& a, const BigNat& b) { return cmp(a, b) > 0; };
    std::make_heap(values.begin(), values.end(), larger);
    while (values.size() > 1) {
        std::pop_heap(values.begin(), values.end(), larger);
        BigNat a = std::move(values.back());
        values.pop_back();
        std::pop_heap(values.begin(), values.end(), larger);
        values.back() *= a;
        std::push_heap(values.begin(), values.end(), larger);
    }
    return std::move(values.front());
}

}  // namespace qsat2
