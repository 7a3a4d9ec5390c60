#include "qsat2/instance.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "qsat2/errors.hpp"
#include "qsat2/rng.hpp"
#include "qsat2/scc.hpp"

namespace qsat2 {

std::vector<BraState> default_factors(std::size_t f) {
    const GaussianRational one(1), zero(0), i = GaussianRational::i();
    std::vector<BraState> out{{one, zero}, {zero, one}, {one, one}, {one, -one}, {one, i}, {one, -i}};
    for (long k = 2; out.size() < f; ++k) {
        out.emplace_back(one, GaussianRational(k));
        out.emplace_back(one, GaussianRational(-k));
        out.emplace_back(one, GaussianRational(k) * i);
        out.emplace_back(one, GaussianRational(-k) * i);
    }
    out.resize(f, out.front());
    return out;
}

FactorDistribution::FactorDistribution(std::vector<BraState> factors, std::vector<mpq_class> q)
    : factors_(std::move(factors)), q_(std::move(q)) {
    const std::size_t f = factors_.size();
    if (f == 0) throw UsageError("factor distribution needs at least one factor");
    if (q_.size() != f) throw UsageError("factor and probability counts differ");
    mpq_class sum = 0;
    for (std::size_t h = 0; h < f; ++h) {
        q_[h].canonicalize();
        if (sgn(q_[h]) <= 0) throw UsageError("probability q_" + std::to_string(h + 1) + " must be positive");
        if (h > 0 && q_[h] > q_[h - 1]) throw UsageError("probabilities must be non-increasing");
        sum += q_[h];
    }
    if (sum != 1) throw UsageError("probabilities sum to " + sum.get_str() + ", not 1");
    for (std::size_t a = 0; a < f; ++a)
        for (std::size_t b = a + 1; b < f; ++b)
            if (proportional(factors_[a], factors_[b])) {
                throw UsageError("factors " + std::to_string(a + 1) + " and " + std::to_string(b + 1) +
                                 " are proportional");
            }

    mpz_class lcm = 1;
    for (const auto& x : q_) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.get_den_mpz_t());
    if (mpz_sizeinbase(lcm.get_mpz_t(), 2) > 62) throw UsageError("common denominator of q exceeds 62 bits");
    denominator_ = lcm.get_ui();
    for (const auto& x : q_) {
        mpz_class w = x.get_num() * (lcm / x.get_den());
        weights_.push_back(w.get_ui());
    }
}

FactorDistribution FactorDistribution::uniform(std::size_t f) {
    if (f == 0) throw UsageError("factor distribution needs at least one factor");
    return FactorDistribution(default_factors(f), std::vector<mpq_class>(f, mpq_class(1, f)));
}

FactorDistribution FactorDistribution::with_weights(std::vector<mpq_class> q) {
    const std::size_t f = q.size();
    return FactorDistribution(default_factors(f), std::move(q));
}

std::vector<mpq_class> parse_q_list(const std::string& text, std::size_t f) {
    if (text == "uniform") {
        if (f == 0) throw UsageError("uniform distribution needs a factor count");
        return std::vector<mpq_class>(f, mpq_class(1, f));
    }
    std::vector<mpq_class> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        mpq_class x;
        if (item.empty() || x.set_str(item, 10) != 0) throw UsageError("bad probability '" + item + "'");
        if (x.get_den() == 0) throw UsageError("zero denominator in '" + item + "'");
        x.canonicalize();
        out.push_back(x);
    }
    if (out.empty()) throw UsageError("empty probability list");
    if (f != 0 && out.size() != f) {
        throw UsageError("probability list has " + std::to_string(out.size()) + " entries, expected " +
                         std::to_string(f));
    }
    return out;
}

void Instance::validate() const {
    if (factors.size() != graph.edge_count()) throw UsageError("one factor pair per edge required");
    for (const auto& ef : factors)
        if (ef.at_u >= f() || ef.at_v >= f()) throw UsageError("factor index out of range");
}

Instance induced_subinstance(const Instance& inst, std::span<const Vertex> vertices) {
    std::vector<Vertex> sorted(vertices.begin(), vertices.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    auto local = [&](Vertex v) -> std::optional<Vertex> {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
        if (it == sorted.end() || *it != v) return std::nullopt;
        return static_cast<Vertex>(it - sorted.begin());
    };
    std::vector<Edge> edges;
    std::vector<EdgeFactors> factors;
    for (std::uint32_t e = 0; e < inst.graph.edge_count(); ++e) {
        const Edge& ed = inst.graph.edge(e);
        const auto a = local(ed.u), b = local(ed.v);
        if (!a || !b) continue;
        // u < v is preserved by the monotone renumbering
        edges.push_back({*a, *b});
        factors.push_back(inst.factors[e]);
    }
    return Instance{Graph(sorted.size(), std::move(edges)), std::move(factors), inst.dist, inst.provenance};
}

Instance sample_instance(const Graph& g, const FactorDistribution& dist, std::uint64_t seed) {
    Rng rng(seed);
    Instance inst{g, {}, dist, {Conditioning::any, seed, 0}};
    inst.factors.reserve(g.edge_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const FactorIndex h = dist.sample(rng);
        const FactorIndex j = dist.sample(rng);
        inst.factors.push_back({h, j});
    }
    return inst;
}

void TwoSat::add_clause(std::uint32_t a, std::uint32_t b) {
    adj_[a ^ 1U].push_back(b);
    adj_[b ^ 1U].push_back(a);
}

std::optional<std::vector<bool>> TwoSat::solve(std::optional<std::uint32_t>* conflict) const {
    Digraph g;
    g.offsets.reserve(adj_.size() + 1);
    for (const auto& out : adj_) {
        g.targets.insert(g.targets.end(), out.begin(), out.end());
        g.offsets.push_back(static_cast<std::uint32_t>(g.targets.size()));
    }
    const SccResult scc = strongly_connected_components(g);
    const std::size_t vars = adj_.size() / 2;
    std::vector<bool> value(vars);
    for (std::uint32_t x = 0; x < vars; ++x) {
        const auto cp = scc.component[2 * x], cn = scc.component[2 * x + 1];
        if (cp == cn) {
            if (conflict) *conflict = x;
            return std::nullopt;
        }
        // components are numbered sinks first
        value[x] = cp < cn;
    }
    return value;
}

SatResult satisfiable(const Instance& inst) {
    inst.validate();
    const std::size_t n = inst.graph.vertex_count(), f = inst.f();
    const LiteralCodec codec{f};
    TwoSat sat(n * f);
    for (std::uint32_t e = 0; e < inst.graph.edge_count(); ++e) {
        const Edge& ed = inst.graph.edge(e);
        sat.add_clause(codec.pos(ed.u, inst.factors[e].at_u), codec.pos(ed.v, inst.factors[e].at_v));
    }
    for (Vertex v = 0; v < n; ++v) {
        if (inst.graph.degree(v) == 0) continue;
        for (FactorIndex a = 0; a < f; ++a)
            for (FactorIndex b = a + 1; b < f; ++b) sat.add_clause(codec.neg(v, a), codec.neg(v, b));
    }
    SatResult r;
    std::optional<std::uint32_t> conflict;
    const auto value = sat.solve(&conflict);
    if (!value) {
        r.conflict_variable = conflict;
        return r;
    }
    r.satisfiable = true;
    r.witness.assign(n, kFree);
    for (Vertex v = 0; v < n; ++v)
        for (FactorIndex h = 0; h < f; ++h)
            if ((*value)[codec.var(v, h)]) r.witness[v] = h;
    // Release vertices whose edges are all satisfied from the other side.
    for (Vertex v = 0; v < n; ++v) {
        bool needed = false;
        for (const auto& inc : inst.graph.incident(v))
            needed = needed || r.witness[inc.neighbor] != inst.factor_at(inc.edge, inc.neighbor);
        if (!needed) r.witness[v] = kFree;
    }
    return r;
}

BackboneTracker::BackboneTracker(std::size_t n, std::size_t f)
    : codec_{f}, clause_arcs_(2 * n * f), entailed_(2 * n * f, 0), stamp_(2 * n * f, 0) {}

template <typename Visit>
void BackboneTracker::closure(std::uint32_t from, Visit&& visit) {
    ++epoch_;
    if (entailed_[from]) return;
    stack_.assign(1, from);
    stamp_[from] = epoch_;
    auto push = [&](std::uint32_t w) {
        if (entailed_[w] || stamp_[w] == epoch_) return;
        stamp_[w] = epoch_;
        stack_.push_back(w);
    };
    while (!stack_.empty()) {
        const std::uint32_t lit = stack_.back();
        stack_.pop_back();
        visit(lit);
        if (LiteralCodec::is_positive(lit)) {
            // at most one factor state per vertex
            const std::uint32_t base = static_cast<std::uint32_t>(2 * codec_.f * codec_.vertex(lit));
            for (std::uint32_t k = 0; k < codec_.f; ++k) {
                const std::uint32_t other = base + 2 * k + 1;
                if (other != (lit ^ 1U)) push(other);
            }
        } else {
            for (std::uint32_t w : clause_arcs_[lit]) push(w);
        }
    }
}

void BackboneTracker::entail_closure(std::uint32_t lit) {
    scratch_.clear();
    closure(lit, [&](std::uint32_t x) { scratch_.push_back(x); });
    for (auto x : scratch_) entailed_[x] = 1;
}

void BackboneTracker::add(std::uint32_t a, std::uint32_t b) {
    if (!admits(a, b)) throw UsageError("clause would make the formula unsatisfiable");
    if (!entailed_[a] && !entailed_[b]) {
        if (entailed_[a ^ 1U]) {
            entail_closure(b);
        } else if (entailed_[b ^ 1U]) {
            entail_closure(a);
        } else {
            // newly entailed: implied both by a and by b. Nodes reached from b
            // are restamped, so the survivors of the first pass carrying the
            // newest stamp form the intersection.
            scratch_.clear();
            closure(a, [&](std::uint32_t x) { scratch_.push_back(x); });
            closure(b, [](std::uint32_t) {});
            for (auto x : scratch_)
                if (stamp_[x] == epoch_) entailed_[x] = 1;
        }
    }
    clause_arcs_[a ^ 1U].push_back(b);
    clause_arcs_[b ^ 1U].push_back(a);
}

Instance sample_frustration_free_instance(const Graph& g, const FactorDistribution& dist, std::uint64_t seed,
                                          std::uint64_t budget) {
    Rng rng(seed);
    std::vector<std::uint32_t> order(g.edge_count());
    std::iota(order.begin(), order.end(), 0U);
    rng.shuffle(order);

    Instance inst{g, std::vector<EdgeFactors>(g.edge_count()), dist, {Conditioning::frustration_free, seed, 0}};
    BackboneTracker tracker(g.vertex_count(), dist.size());
    const LiteralCodec& codec = tracker.codec();
    for (std::uint32_t e : order) {
        const Edge& ed = g.edge(e);
        for (std::uint64_t tries = 0;; ++tries) {
            const FactorIndex h = dist.sample(rng);
            const FactorIndex j = dist.sample(rng);
            const std::uint32_t a = codec.pos(ed.u, h), b = codec.pos(ed.v, j);
            if (tracker.admits(a, b)) {
                tracker.add(a, b);
                inst.factors[e] = {h, j};
                break;
            }
            if (tries >= budget) {
                throw ResampleBudgetError("edge " + std::to_string(ed.u + 1) + "-" + std::to_string(ed.v + 1) +
                                          " rejected " + std::to_string(tries + 1) +
                                          " constraint draws; resample budget " + std::to_string(budget));
            }
            ++inst.provenance.resamples;
        }
    }
    return inst;
}

Instance generate_instance(const GenerateSpec& spec, std::uint64_t seed) {
    const std::uint64_t graph_seed = substream_seed(seed, 1);
    const std::uint64_t constraint_seed = substream_seed(seed, 2);
    Graph g;
    switch (spec.model) {
        case GraphModel::er: g = sample_er_graph(spec.n, spec.m, graph_seed); break;
        case GraphModel::lat2: g = sample_lattice(2, spec.side, spec.p, graph_seed); break;
        case GraphModel::lat3: g = sample_lattice(3, spec.side, spec.p, graph_seed); break;
    }
    Instance inst = spec.cond == Conditioning::frustration_free
                        ? sample_frustration_free_instance(g, spec.dist, constraint_seed, spec.budget)
                        : sample_instance(g, spec.dist, constraint_seed);
    inst.provenance.seed = seed;
    return inst;
}

void write_instance(std::ostream& os, const Instance& inst) {
    const Graph& g = inst.graph;
    os << "QSAT2 v1\n";
    os << "n=" << g.vertex_count() << " m=" << g.edge_count() << " f=" << inst.f()
       << " model=" << to_string(g.model()) << " L=" << (g.lattice() ? g.lattice()->side : 0)
       << " seed=" << inst.provenance.seed
       << " cond=" << (inst.provenance.cond == Conditioning::frustration_free ? "free" : "any")
       << " resamples=" << inst.provenance.resamples << "\n";
    for (std::size_t h = 0; h < inst.f(); ++h) os << "F " << h + 1 << " " << inst.dist.factors()[h].to_string() << "\n";
    for (std::size_t h = 0; h < inst.f(); ++h) {
        const auto& q = inst.dist.q()[h];
        os << "Q " << h + 1 << " " << q.get_num().get_str() << "/" << q.get_den().get_str() << "\n";
    }
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        os << "E " << g.edge(e).u + 1 << " " << g.edge(e).v + 1 << " " << inst.factors[e].at_u + 1 << " "
           << inst.factors[e].at_v + 1 << "\n";
    }
}

std::string instance_to_string(const Instance& inst) {
    std::ostringstream os;
    write_instance(os, inst);
    return os.str();
}

namespace {

class LineReader {
public:
    explicit LineReader(std::istream& is) : is_(is) {}

    std::vector<std::string> next(const char* what) {
        std::string line;
        while (std::getline(is_, line)) {
            ++number_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            std::istringstream ss(line);
            std::vector<std::string> tokens;
            for (std::string t; ss >> t;) tokens.push_back(t);
            return tokens;
        }
        fail(std::string("unexpected end of input, expected ") + what);
    }

    bool at_end() {
        std::string line;
        while (std::getline(is_, line)) {
            ++number_;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return false;
        }
        return true;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("line " + std::to_string(number_) + ": " + what);
    }

    std::uint64_t number(const std::string& text, const char* what) const {
        if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos || text.size() > 20)
            fail(std::string("bad ") + what + " '" + text + "'");
        try {
            return std::stoull(text);
        } catch (const std::exception&) {
            fail(std::string("bad ") + what + " '" + text + "'");
        }
    }

    std::string keyed(const std::string& token, const std::string& key) const {
        if (token.rfind(key + "=", 0) != 0) fail("expected '" + key + "=', got '" + token + "'");
        return token.substr(key.size() + 1);
    }

private:
    std::istream& is_;
    std::size_t number_ = 0;
};

}  // namespace

Instance read_instance(std::istream& is) {
    LineReader in(is);
    auto header = in.next("header");
    if (header.size() != 2 || header[0] != "QSAT2" || header[1] != "v1") in.fail("expected 'QSAT2 v1'");

    auto meta = in.next("parameter line");
    if (meta.size() != 8) in.fail("parameter line needs 8 fields");
    const std::size_t n = in.number(in.keyed(meta[0], "n"), "n");
    const std::size_t m = in.number(in.keyed(meta[1], "m"), "m");
    const std::size_t f = in.number(in.keyed(meta[2], "f"), "f");
    GraphModel model;
    try {
        model = parse_graph_model(in.keyed(meta[3], "model"));
    } catch (const ParseError& e) {
        in.fail(e.what());
    }
    const std::size_t side = in.number(in.keyed(meta[4], "L"), "L");
    Provenance prov;
    prov.seed = in.number(in.keyed(meta[5], "seed"), "seed");
    const std::string cond = in.keyed(meta[6], "cond");
    if (cond == "free") prov.cond = Conditioning::frustration_free;
    else if (cond == "any") prov.cond = Conditioning::any;
    else in.fail("cond must be free or any");
    prov.resamples = in.number(in.keyed(meta[7], "resamples"), "resamples");
    if (f == 0) in.fail("f must be positive");
    if (n > 0xffffffffULL) in.fail("n too large");

    std::optional<LatticeGeometry> geo;
    if (model != GraphModel::er) {
        geo = LatticeGeometry{model == GraphModel::lat2 ? 2 : 3, static_cast<std::uint32_t>(side)};
        if (side < 2 || geo->vertex_count() != n) in.fail("lattice side does not match n");
    } else if (side != 0) {
        in.fail("L must be 0 for model=er");
    }

    std::vector<BraState> factors;
    for (std::size_t h = 0; h < f; ++h) {
        auto t = in.next("factor line");
        if (t.size() != 3 || t[0] != "F" || in.number(t[1], "factor index") != h + 1)
            in.fail("expected 'F " + std::to_string(h + 1) + " (<gq>,<gq>)'");
        try {
            factors.push_back(BraState::parse(t[2]));
        } catch (const ParseError& e) {
            in.fail(e.what());
        }
    }
    std::vector<mpq_class> q;
    for (std::size_t h = 0; h < f; ++h) {
        auto t = in.next("probability line");
        if (t.size() != 3 || t[0] != "Q" || in.number(t[1], "probability index") != h + 1)
            in.fail("expected 'Q " + std::to_string(h + 1) + " <num>/<den>'");
        const auto slash = t[2].find('/');
        if (slash == std::string::npos) in.fail("probability must be written num/den");
        const mpz_class num(in.number(t[2].substr(0, slash), "numerator"));
        const mpz_class den(in.number(t[2].substr(slash + 1), "denominator"));
        if (den == 0) in.fail("zero denominator");
        q.emplace_back(num, den);
    }
    std::optional<FactorDistribution> dist;
    try {
        dist.emplace(std::move(factors), std::move(q));
    } catch (const UsageError& e) {
        in.fail(e.what());
    }

    std::vector<std::pair<Edge, EdgeFactors>> rows;
    rows.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        auto t = in.next("edge line");
        if (t.size() != 5 || t[0] != "E") in.fail("expected 'E <u> <v> <h> <j>'");
        const auto u = in.number(t[1], "vertex"), v = in.number(t[2], "vertex");
        const auto h = in.number(t[3], "factor index"), j = in.number(t[4], "factor index");
        if (u < 1 || v > n || u >= v) in.fail("edge endpoints must satisfy 1 <= u < v <= n");
        if (h < 1 || h > f || j < 1 || j > f) in.fail("factor index out of range");
        rows.push_back({{static_cast<Vertex>(u - 1), static_cast<Vertex>(v - 1)},
                        {static_cast<FactorIndex>(h - 1), static_cast<FactorIndex>(j - 1)}});
    }
    if (!in.at_end()) in.fail("trailing content after " + std::to_string(m) + " edges");
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<Edge> edges;
    std::vector<EdgeFactors> ef;
    for (const auto& [e, x] : rows) {
        edges.push_back(e);
        ef.push_back(x);
    }
    Instance inst;
    try {
        inst.graph = Graph(n, std::move(edges), geo);
    } catch (const UsageError& e) {
        throw ParseError(e.what());
    }
    if (geo) {
        for (const auto& e : inst.graph.edges()) {
            const auto a = geo->coords(e.u), b = geo->coords(e.v);
            int differ = 0;
            bool unit = true;
            for (int k = 0; k < geo->dim; ++k) {
                if (a[k] != b[k]) {
                    ++differ;
                    unit = unit && (a[k] + 1 == b[k] || b[k] + 1 == a[k]);
                }
            }
            if (differ != 1 || !unit) throw ParseError("edge " + std::to_string(e.u + 1) + "-" +
                                                       std::to_string(e.v + 1) + " is not a lattice bond");
        }
    }
    inst.factors = std::move(ef);
    inst.dist = std::move(*dist);
    inst.provenance = prov;
    return inst;
}

Instance parse_instance(const std::string& text) {
    std::istringstream is(text);
    return read_instance(is);
}

Instance load_instance(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open instance file '" + path + "'");
    return read_instance(is);
}

void save_instance(const std::string& path, const Instance& inst) {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot write '" + path + "'");
    write_instance(os, inst);
    if (!os) throw UsageError("failed writing '" + path + "'");
}

}  // namespace qsat2
