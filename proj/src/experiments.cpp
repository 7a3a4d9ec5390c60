#include "qsat2/experiments.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "qsat2/errors.hpp"
#include "qsat2/rng.hpp"

namespace qsat2 {

std::uint64_t derive_trial_seed(std::uint64_t master, std::uint64_t grid_index, std::uint64_t trial_index) {
    std::uint64_t h = splitmix64_mix(master ^ 0x6a09e667f3bcc909ULL);
    h = splitmix64_mix(h ^ splitmix64_mix(grid_index + 0xbb67ae8584caa73bULL));
    h = splitmix64_mix(h ^ splitmix64_mix(trial_index + 0x3c6ef372fe94f82bULL));
    return h;
}

FactorDistribution SweepConfig::distribution() const {
    return FactorDistribution::with_weights(parse_q_list(q, f));
}

void SweepConfig::validate() const {
    if (trials < 1) throw UsageError("trials must be at least 1");
    if (grid.empty()) throw UsageError("grid must list at least one value");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw UsageError("grid must be strictly increasing");
    if (model == GraphModel::er) {
        if (n < 1) throw UsageError("er sweeps need n >= 1");
        for (double g : grid)
            if (!(g >= 0.0)) throw UsageError("edge densities must be non-negative");
    } else {
        if (side < 2) throw UsageError("lattice sweeps need L >= 2");
        for (double p : grid)
            if (!(p >= 0.0 && p <= 1.0)) throw UsageError("bond probabilities must lie in [0,1]");
    }
    if (!(cutoff_c > 0.0)) throw UsageError("cutoff constant must be positive");
    distribution();
}

namespace {

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw UsageError(key + ": expected true or false, got '" + v + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end) throw UsageError(key + ": bad number '" + v + "'");
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

SweepConfig parse_sweep_config(std::istream& is) {
    SweepConfig cfg;
    std::map<std::string, std::string> seen;
    std::string line;
    std::size_t number = 0;
    while (std::getline(is, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config line " + std::to_string(number) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (!seen.emplace(key, v).second) throw UsageError("config key '" + key + "' given twice");
        if (key == "model") {
            try {
                cfg.model = parse_graph_model(v);
            } catch (const ParseError& e) {
                throw UsageError(e.what());
            }
        } else if (key == "n") cfg.n = parse_number<std::size_t>(key, v);
        else if (key == "L") cfg.side = parse_number<std::uint32_t>(key, v);
        else if (key == "grid") {
            std::stringstream ss(v);
            for (std::string item; std::getline(ss, item, ',');) cfg.grid.push_back(parse_number<double>(key, trim(item)));
        } else if (key == "trials") cfg.trials = parse_number<std::size_t>(key, v);
        else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, v);
        else if (key == "f") cfg.f = parse_number<std::size_t>(key, v);
        else if (key == "q") cfg.q = v;
        else if (key == "cond") {
            if (v == "any") cfg.cond = Conditioning::any;
            else if (v == "ff" || v == "free") cfg.cond = Conditioning::frustration_free;
            else throw UsageError("cond must be any or ff");
        } else if (key == "c") cfg.cutoff_c = parse_number<double>(key, v);
        else if (key == "max_component") cfg.max_component_qubits = parse_number<std::size_t>(key, v);
        else if (key == "value") cfg.compute_value = parse_bool(key, v);
        else if (key == "fig8") cfg.figure_eights = parse_bool(key, v);
        else if (key == "timing") cfg.timing = parse_bool(key, v);
        else if (key == "budget") cfg.budget = parse_number<std::uint64_t>(key, v);
        else if (key == "threads") cfg.threads = parse_number<unsigned>(key, v);
        else throw UsageError("unknown config key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot open config '" + path + "'");
    return parse_sweep_config(is);
}

Instance trial_instance(const SweepConfig& cfg, double grid_value, std::uint64_t seed) {
    GenerateSpec spec;
    spec.model = cfg.model;
    spec.dist = cfg.distribution();
    spec.cond = cfg.cond;
    spec.budget = cfg.budget;
    if (cfg.model == GraphModel::er) {
        spec.n = cfg.n;
        spec.m = static_cast<std::size_t>(std::llround(grid_value * static_cast<double>(cfg.n)));
    } else {
        spec.side = cfg.side;
        spec.p = grid_value;
    }
    return generate_instance(spec, seed);
}

std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_log2(const BigNat& v) {
    if (sgn(v) <= 0) return "-inf";
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", static_cast<double>(exp) + std::log2(mant));
    return buf;
}

TrialRecord run_trial(const SweepConfig& cfg, std::size_t grid_index, std::size_t trial) {
    const auto start = std::chrono::steady_clock::now();
    TrialRecord r;
    r.grid_index = grid_index;
    r.grid = cfg.grid.at(grid_index);
    r.trial = trial;
    r.seed = derive_trial_seed(cfg.seed, grid_index, trial);
    try {
        const Instance inst = trial_instance(cfg, r.grid, r.seed);
        r.n = inst.graph.vertex_count();
        r.m = inst.graph.edge_count();
        r.resamples = inst.provenance.resamples;
        const StructureReport rep = analyze_structure(inst, cfg.cutoff_c, false);
        r.frustrated = !rep.sat.satisfiable;
        r.max_comp = rep.components.max_size;
        r.multicyclic = rep.components.multicyclic_count();
        r.frozen_core = rep.frozen.core_size();
        r.residual_max = rep.decomposition.residual_max;
        r.label = rep.decomposition.label;
        if (cfg.figure_eights) {
            std::size_t count = 0;
            for (const auto& fig : enumerate_figure_eights(inst.graph, 3))
                if (is_frustrated_figure_eight(inst, fig)) ++count;
            r.fig8_l3 = count;
        }
        if (inst.graph.lattice()) r.dominoes = enumerate_dominoes(inst.graph).size();
        if (cfg.compute_value) {
            if (r.frustrated) {
                r.value = "-inf";
            } else {
                RankBackendConfig rb;
                rb.max_component_qubits = cfg.max_component_qubits;
                try {
                    r.value = format_log2(instance_value(inst, rep, rb).value);
                } catch (const ComponentCapError& e) {
                    r.value = "NA:" + std::to_string(e.size());
                }
            }
        }
    } catch (const Error& e) {
        r.error = e.what();
    }
    if (cfg.timing)
        r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

GridSummary summarize(std::size_t grid_index, double grid, const std::vector<TrialRecord>& rows) {
    GridSummary s;
    s.grid_index = grid_index;
    s.grid = grid;
    std::size_t frustrated = 0;
    double max_comp = 0, frozen = 0;
    for (const auto& r : rows) {
        if (r.grid_index != grid_index || r.error) continue;
        ++s.trials;
        frustrated += r.frustrated ? 1 : 0;
        max_comp += static_cast<double>(r.max_comp);
        frozen += r.n ? static_cast<double>(r.frozen_core) / static_cast<double>(r.n) : 0.0;
    }
    if (s.trials) {
        const auto t = static_cast<double>(s.trials);
        s.frustrated_fraction = static_cast<double>(frustrated) / t;
        s.mean_max_comp = max_comp / t;
        s.mean_frozen_fraction = frozen / t;
    }
    return s;
}

SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const std::size_t total = cfg.grid.size() * cfg.trials;
    SweepResult out;
    out.records.resize(total);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t task; (task = next.fetch_add(1)) < total;)
            out.records[task] = run_trial(cfg, task / cfg.trials, task % cfg.trials);
    };
    const unsigned threads = std::max(1U, std::min<unsigned>(cfg.threads, static_cast<unsigned>(total)));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (std::size_t g = 0; g < cfg.grid.size(); ++g) out.summaries.push_back(summarize(g, cfg.grid[g], out.records));
    return out;
}

void write_csv(std::ostream& os, const SweepResult& result) {
    os << kCsvHeader << "\n";
    auto opt = [](const std::optional<std::size_t>& x) { return x ? std::to_string(*x) : std::string("NA"); };
    std::size_t k = 0;
    for (const auto& s : result.summaries) {
        for (; k < result.records.size() && result.records[k].grid_index == s.grid_index; ++k) {
            const TrialRecord& r = result.records[k];
            os << format_double(r.grid) << "," << r.trial << "," << r.seed << ",";
            if (r.error) {
                std::string msg = *r.error;
                for (char& c : msg)
                    if (c == ',' || c == '\n' || c == '"') c = ' ';
                os << "NA,NA,NA,NA,NA,NA,NA,error,NA,NA,NA:" << msg << ",NA,"
                   << (r.ms ? format_double(*r.ms) : "NA") << "\n";
                continue;
            }
            os << r.n << "," << r.m << "," << (r.frustrated ? 1 : 0) << "," << r.max_comp << "," << r.multicyclic
               << "," << r.frozen_core << "," << r.residual_max << "," << to_string(r.label) << ","
               << opt(r.fig8_l3) << "," << opt(r.dominoes) << "," << r.value << "," << r.resamples << ","
               << (r.ms ? format_double(*r.ms) : "NA") << "\n";
        }
        os << format_double(s.grid) << ",summary,NA,NA,NA," << format_double(s.frustrated_fraction) << ","
           << format_double(s.mean_max_comp) << ",NA," << format_double(s.mean_frozen_fraction)
           << ",NA,NA,NA,NA,NA,NA,NA\n";
    }
}

}  // namespace qsat2
