// Desk-scale acceptance checks. One PASS/FAIL line per criterion; the exit
// status is the number of failures. Optional arguments pick criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "qsat2/cli.hpp"
#include "qsat2/constraint_algebra.hpp"
#include "qsat2/counting.hpp"
#include "qsat2/experiments.hpp"
#include "qsat2/graph.hpp"
#include "qsat2/instance.hpp"
#include "qsat2/rng.hpp"
#include "qsat2/statistics.hpp"
#include "qsat2/structure.hpp"
#include "support.hpp"

using namespace qsat2;
using namespace qsat2::test;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

unsigned worker_count() { return std::max(1U, std::thread::hardware_concurrency()); }

double mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
    const double m = mean(xs);
    double s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

// 1: satisfiability, fixed states and the decoupled value against dense
// linear algebra on small instances.
Outcome oracle_equivalence() {
    std::size_t instances = 0, failures = 0, frozen_checked = 0, unsat = 0;
    std::string first_failure;
    auto fail = [&](const std::string& what, std::uint64_t seed) {
        if (failures++ == 0) first_failure = what + " (seed " + std::to_string(seed) + ")";
    };
    Rng rng(0xacce97);
    for (GraphModel model : {GraphModel::er, GraphModel::lat2, GraphModel::lat3}) {
        for (std::size_t f : {1U, 2U, 3U}) {
            for (Conditioning cond : {Conditioning::any, Conditioning::frustration_free}) {
                for (int t = 0; t < 40; ++t) {
                    GenerateSpec spec;
                    spec.model = model;
                    spec.dist = FactorDistribution::uniform(f);
                    spec.cond = cond;
                    if (model == GraphModel::er) {
                        spec.n = 4 + rng.below(7);
                        spec.m = rng.below(std::min<std::size_t>(spec.n * (spec.n - 1) / 2, 3 * spec.n) + 1);
                    } else {
                        spec.side = model == GraphModel::lat2 ? 3 : 2;
                        spec.p = 0.4 + 0.6 * rng.unit();
                    }
                    const std::uint64_t seed = rng.next();
                    const Instance inst = generate_instance(spec, seed);
                    ++instances;

                    const bool sat = satisfiable(inst).satisfiable;
                    const auto dense = dense_value(inst);
                    const auto decoupled = instance_value(inst, {}, ValueRoute::decoupled);
                    const auto raw = instance_value(inst, {}, ValueRoute::raw);
                    unsat += sat ? 0 : 1;
                    if (sat != (decoupled.value > 0)) fail("satisfiable disagrees with the value", seed);
                    if (sat != (dense > 0)) fail("satisfiable disagrees with the dense kernel", seed);
                    if (decoupled.value != dense) fail("decoupled value differs from the dense kernel", seed);
                    if (raw.value != dense) fail("raw value differs from the dense kernel", seed);
                    if (cond == Conditioning::frustration_free && !sat) fail("conditioned instance frustrated", seed);
                    if (!sat) continue;

                    const FixedStates fixed = fixed_states(inst);
                    for (const auto& members : components(inst.graph).members) {
                        const Instance sub = induced_subinstance(inst, members);
                        const auto basis = dense_kernel_basis(sub);
                        for (std::size_t k = 0; k < members.size(); ++k) {
                            if (!fixed.frozen(members[k])) continue;
                            ++frozen_checked;
                            if (!kernel_pinned(sub, basis, static_cast<Vertex>(k), fixed.state[members[k]]))
                                fail("fixed state not pinned in the kernel", seed);
                        }
                    }
                }
            }
        }
    }
    Outcome o;
    o.pass = failures == 0 && instances >= 500;
    o.detail = std::to_string(instances) + " instances, " + std::to_string(unsat) + " frustrated, " +
               std::to_string(frozen_checked) + " fixed states checked, " + std::to_string(failures) + " failures";
    if (failures) o.detail += "; first: " + first_failure;
    return o;
}

// 2: a path of six constraints with uniform f = 2 survives contraction with
// probability Q2^5 = 1/32.
Outcome chain_survival() {
    const FactorDistribution dist = FactorDistribution::uniform(2);
    const std::size_t len = 6, samples = 100000;
    std::vector<Vertex> path(len + 1);
    for (std::size_t k = 0; k <= len; ++k) path[k] = static_cast<Vertex>(k);
    Rng rng(0xc4a1);
    std::size_t alive = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<BraConstraint> cs;
        for (std::size_t k = 0; k < len; ++k)
            cs.push_back(realize({path[k], path[k + 1], dist.sample(rng), dist.sample(rng)}, dist.factors()));
        alive += chain_constraint(path, cs).is_zero() ? 0 : 1;
    }
    const double p = 0.03125, rate = static_cast<double>(alive) / samples;
    const double sigma = std::sqrt(p * (1 - p) / samples);
    Outcome o;
    o.pass = std::abs(rate - p) <= 3 * sigma;
    o.detail = "rate " + fmt("%.5f", rate) + " vs 0.03125, " + fmt("%.2f", std::abs(rate - p) / sigma) + " sigma";
    return o;
}

// 3: mean number of frustrated figure eights of two triangles.
Outcome figure_eights() {
    const std::size_t n = 60, m = 90, trials = 2000;
    const FactorDistribution dist = FactorDistribution::uniform(3);
    const mpq_class exact = expected_figure_eights(n, m, 3, functionals(dist));
    std::vector<double> counts;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t seed = derive_trial_seed(0xf18, 0, t);
        const Instance inst = sample_instance(sample_er_graph(n, m, seed), dist, seed ^ 0x5bd1e995ULL);
        std::size_t c = 0;
        for (const auto& fig : enumerate_figure_eights(inst.graph, 3))
            if (is_frustrated_figure_eight(inst, fig)) ++c;
        counts.push_back(static_cast<double>(c));
    }
    const double mu = mean(counts), se = sample_sd(counts) / std::sqrt(static_cast<double>(trials));
    const double target = exact.get_d();
    Outcome o;
    o.pass = se > 0 && std::abs(mu - target) <= 3 * se;
    o.detail = "mean " + fmt("%.5f", mu) + " vs exact " + exact.get_str() + " = " + fmt("%.5f", target) + ", " +
               fmt("%.2f", se > 0 ? std::abs(mu - target) / se : 0.0) + " sigma";
    return o;
}

SweepConfig sweep_config(const std::string& text) {
    std::istringstream is(text);
    SweepConfig cfg = parse_sweep_config(is);
    cfg.threads = worker_count();
    return cfg;
}

// 4: below 1/2 the graph stays in small trees and unicyclic pieces; above
// 1/(2 Q2) = 1 it is frustrated.
Outcome er_phases() {
    const auto cfg = sweep_config("model=er\nn=4000\ngrid=0.3,1.4\ntrials=100\nseed=4\nf=2\nvalue=false\n");
    const auto result = run_sweep(cfg);
    const double bound = 12 * std::log(4000.0);
    std::size_t low_ok = 0, high_ok = 0, errors = 0;
    for (const auto& r : result.records) {
        if (r.error) {
            ++errors;
            continue;
        }
        if (r.grid_index == 0)
            low_ok += static_cast<double>(r.max_comp) <= bound && r.multicyclic == 0 &&
                      r.label == PhaseLabel::highly_disconnected;
        else
            high_ok += r.frustrated;
    }
    Outcome o;
    o.pass = low_ok >= 95 && high_ok >= 95 && errors == 0;
    o.detail = "gamma=0.3: " + std::to_string(low_ok) + "/100 small, acyclic-or-unicyclic, highly_disconnected; " +
               "gamma=1.4: " + std::to_string(high_ok) + "/100 frustrated";
    return o;
}

// 5: conditioned instances at gamma = 2.5, f = 4 decouple around a frozen core.
Outcome decoupling() {
    const auto cfg = sweep_config("model=er\nn=4000\ngrid=2.5\ntrials=100\nseed=5\nf=4\ncond=ff\nvalue=false\n");
    const auto result = run_sweep(cfg);
    const double predicted = frozen_core_fraction(2.5, 0.75);
    std::size_t decoupled = 0, errors = 0;
    std::vector<double> frozen;
    for (const auto& r : result.records) {
        if (r.error) {
            ++errors;
            continue;
        }
        decoupled += r.label == PhaseLabel::highly_decoupled;
        frozen.push_back(static_cast<double>(r.frozen_core) / static_cast<double>(r.n));
    }
    const double mu = frozen.empty() ? 0.0 : mean(frozen);
    const double lowest = frozen.empty() ? 0.0 : *std::min_element(frozen.begin(), frozen.end());
    Outcome o;
    o.pass = decoupled >= 90 && errors == 0 && mu >= predicted - 0.05;
    o.detail = std::to_string(decoupled) + "/100 highly_decoupled; frozen core fraction mean " + fmt("%.4f", mu) +
               " (min " + fmt("%.4f", lowest) + ") vs prediction " + fmt("%.4f", predicted);
    return o;
}

Instance domino_instance(const Instance& inst, const Domino& d) {
    std::vector<Edge> edges;
    std::vector<EdgeFactors> factors;
    auto local = [&](Vertex v) {
        return static_cast<Vertex>(std::find(d.vertices.begin(), d.vertices.end(), v) - d.vertices.begin());
    };
    for (std::uint32_t e : d.edges) {
        const Edge& ed = inst.graph.edge(e);
        Vertex a = local(ed.u), b = local(ed.v);
        EdgeFactors fac = inst.factors[e];
        if (a > b) {
            std::swap(a, b);
            std::swap(fac.at_u, fac.at_v);
        }
        edges.push_back({a, b});
        factors.push_back(fac);
    }
    Instance out;
    out.graph = Graph(6, edges);
    out.dist = inst.dist;
    out.factors.resize(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k)
        out.factors[*out.graph.find_edge(edges[k].u, edges[k].v)] = factors[k];
    return out;
}

// 6: domino counts on the square lattice and frustration by dominoes.
Outcome dominoes() {
    const std::uint32_t side = 60;
    const double p = 0.3;
    const std::size_t trials = 200;
    const FactorDistribution dist = FactorDistribution::uniform(2);

    // Chance that a single domino with i.i.d. factors is frustrated, by
    // exhaustive search over all 2^14 factor assignments; the dense kernel
    // and the product search must agree on every one.
    const std::vector<std::pair<Vertex, Vertex>> shape = {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {0, 3}, {1, 4}, {2, 5}};
    std::size_t frustrated_assignments = 0, disagreements = 0;
    for (std::uint32_t mask = 0; mask < (1U << 14); ++mask) {
        std::vector<EdgeSpec> es;
        for (std::size_t k = 0; k < shape.size(); ++k)
            es.emplace_back(shape[k].first, shape[k].second, (mask >> (2 * k)) & 1U, (mask >> (2 * k + 1)) & 1U);
        const Instance one = make_instance(6, 2, es);
        const bool product = brute_force_satisfiable(one);
        frustrated_assignments += product ? 0 : 1;
        disagreements += product == (dense_value(one) > 0) ? 0 : 1;
    }
    const double per_domino = static_cast<double>(frustrated_assignments) / 16384.0;

    std::vector<double> counts;
    double model_fraction = 0;
    std::size_t with_frustrated = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t seed = derive_trial_seed(0xd0, 0, t);
        const Instance inst = sample_instance(sample_lattice(2, side, p, seed), dist, seed ^ 0x9e3779b9ULL);
        const auto found = enumerate_dominoes(inst.graph);
        counts.push_back(static_cast<double>(found.size()));
        model_fraction += 1 - std::pow(1 - per_domino, static_cast<double>(found.size()));
        bool any = false;
        for (const auto& d : found) any = any || !satisfiable(domino_instance(inst, d)).satisfiable;
        with_frustrated += any;
    }
    model_fraction /= trials;
    const double expected = 2.0 * (side - 1) * (side - 2) * std::pow(p, 7);
    const double mu = mean(counts), se = sample_sd(counts) / std::sqrt(static_cast<double>(trials));
    const double observed = static_cast<double>(with_frustrated) / trials;
    Outcome o;
    o.pass = std::abs(mu - expected) <= 3 * se && std::abs(observed - model_fraction) <= 0.05 && disagreements == 0;
    o.detail = "domino mean " + fmt("%.4f", mu) + " vs " + fmt("%.4f", expected) + " (" +
               fmt("%.2f", std::abs(mu - expected) / se) + " sigma); per-domino frustration " +
               std::to_string(frustrated_assignments) + "/16384 (dense disagreements " +
               std::to_string(disagreements) + "); instances with a frustrated domino " +
               fmt("%.3f", observed) + " vs model " + fmt("%.3f", model_fraction);
    return o;
}

// 7: bond percolation on the square lattice brackets p_c = 1/2.
Outcome percolation() {
    const std::uint32_t side = 100;
    std::size_t above = 0, below = 0;
    for (std::size_t t = 0; t < 100; ++t) {
        const auto hi = components(sample_lattice(2, side, 0.7, derive_trial_seed(0x7e, 0, t)));
        const auto lo = components(sample_lattice(2, side, 0.3, derive_trial_seed(0x7e, 1, t)));
        above += static_cast<double>(hi.max_size) / (side * side) >= 0.25;
        below += static_cast<double>(lo.max_size) / (side * side) <= 0.05;
    }
    Outcome o;
    o.pass = above >= 90 && below >= 90;
    o.detail = "p=0.7: " + std::to_string(above) + "/100 with max cluster >= 0.25; p=0.3: " + std::to_string(below) +
               "/100 with max cluster <= 0.05";
    return o;
}

// 8: the tree-fraction function and the residual edge density.
Outcome xi_checks() {
    double worst_residual = 0, worst_series = 0;
    for (int k = 0; k <= 250; ++k) {
        const double rho = 0.51 + 0.01 * k, x = xi(rho);
        worst_residual = std::max(worst_residual, std::abs(x * std::exp(-x) - 2 * rho * std::exp(-2 * rho)));
    }
    for (double d : {0.1, 0.05, 0.02, 0.01})
        for (double rho : {0.5 - d, 0.5 + d})
            worst_series = std::max(worst_series, std::abs(xi(rho) - xi_series(rho, 1e-13)));
    std::size_t exact = 0, bounded = 0, exact_points = 0, bound_points = 0;
    const double qinf = 0.75;
    for (int k = 0; k < 50; ++k) {
        const double gamma = 0.02 + 0.08 * k;
        const double g = residual_density(gamma, qinf);
        if (gamma * qinf <= 0.5) {
            ++exact_points;
            exact += g == gamma;
        } else {
            ++bound_points;
            bounded += g <= gamma * std::exp(1 - 2 * gamma * qinf);
        }
    }
    Outcome o;
    o.pass = worst_residual < 1e-12 && worst_series < 1e-8 && exact == exact_points && bounded == bound_points &&
             exact_points > 0 && bound_points > 0;
    o.detail = "max residual " + fmt("%.2e", worst_residual) + ", max series gap " + fmt("%.2e", worst_series) +
               ", exact " + std::to_string(exact) + "/" + std::to_string(exact_points) + ", bounded " +
               std::to_string(bounded) + "/" + std::to_string(bound_points);
    return o;
}

// 9: product tree against the running product, and its speed.
Outcome products() {
    Rng rng(0x9);
    gmp_randclass gen(gmp_randinit_default);
    gen.seed(12345);
    std::vector<BigNat> values;
    BigNat running = 1;
    for (int k = 0; k < 10000; ++k) {
        values.push_back(gen.get_z_bits(1 + rng.below(200)) + 1);
        running *= values.back();
    }
    const bool equal = product_tree(values) == running;

    std::vector<BigNat> words;
    for (int k = 0; k < 10000; ++k) words.push_back(gen.get_z_bits(64) | (BigNat(1) << 63));
    const auto start = std::chrono::steady_clock::now();
    const BigNat big = product_tree(words);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Outcome o;
    o.pass = equal && secs < 1.0 && mpz_sizeinbase(big.get_mpz_t(), 2) > 630000;
    o.detail = std::string(equal ? "tree equals running product" : "tree differs from running product") +
               "; 10^4 words multiplied in " + fmt("%.3f", secs) + " s";
    return o;
}

// 10: the sweep subcommand writes identical bytes for any worker count.
Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("qsat2_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto run = [&](const std::string& cfg, const std::string& threads) {
        const std::string out = (dir / ("out" + threads + ".csv")).string();
        const std::string c = cfg, t = threads;
        const char* argv[] = {"qsat2", "sweep", "--config", c.c_str(), "--out", out.c_str(), "--threads", t.c_str()};
        std::ostringstream so, se;
        if (run_cli(8, argv, so, se) != 0) return std::string("<failed: ") + se.str() + ">";
        std::ifstream is(out);
        std::stringstream ss;
        ss << is.rdbuf();
        return ss.str();
    };
    const std::vector<std::string> configs = {
        "model=er\nn=1500\ngrid=0.3,0.8,1.4\ntrials=12\nseed=10\nf=3\nfig8=true\n",
        "model=er\nn=1500\ngrid=1.5,2.5\ntrials=8\nseed=11\nf=4\ncond=ff\n",
        "model=lat2\nL=40\ngrid=0.3,0.5,0.7\ntrials=6\nseed=12\n",
    };
    bool same = true;
    std::size_t bytes = 0;
    for (std::size_t k = 0; k < configs.size(); ++k) {
        const std::string path = (dir / ("sweep" + std::to_string(k) + ".cfg")).string();
        std::ofstream(path) << configs[k];
        const std::string one = run(path, "1"), four = run(path, "4"), three = run(path, "3");
        same = same && one == four && one == three && one.rfind(kCsvHeader, 0) == 0;
        bytes += one.size();
    }
    fs::remove_all(dir);
    Outcome o;
    o.pass = same;
    o.detail = std::to_string(configs.size()) + " configs, 1/3/4 threads, " + std::to_string(bytes) +
               (same ? " bytes identical" : " bytes, outputs differ");
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"oracle equivalence on small instances", oracle_equivalence},
        {"chain survival rate for l=6, f=2", chain_survival},
        {"expected frustrated figure eights, n=60 m=90 l=3 f=3", figure_eights},
        {"ER phases at gamma 0.3 and 1.4, f=2", er_phases},
        {"frustration-free decoupling at gamma 2.5, f=4", decoupling},
        {"domino statistics on the square lattice", dominoes},
        {"bond percolation brackets p_c", percolation},
        {"xi fixed point and residual density", xi_checks},
        {"product tree", products},
        {"sweep determinism across thread counts", determinism},
    };
    std::vector<std::size_t> picked;
    for (int a = 1; a < argc; ++a) {
        const long k = std::strtol(argv[a], nullptr, 10);
        if (k < 1 || k > static_cast<long>(criteria.size())) {
            std::fprintf(stderr, "unknown criterion '%s'\n", argv[a]);
            return 2;
        }
        picked.push_back(static_cast<std::size_t>(k - 1));
    }
    if (picked.empty())
        for (std::size_t k = 0; k < criteria.size(); ++k) picked.push_back(k);
    int failures = 0;
    for (std::size_t k : picked) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += o.pass ? 0 : 1;
        std::printf("%s criterion %zu: %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures;
}
