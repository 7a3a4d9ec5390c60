#include "qsat2/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qsat2/counting.hpp"
#include "qsat2/errors.hpp"
#include "qsat2/experiments.hpp"
#include "qsat2/statistics.hpp"
#include "qsat2/structure.hpp"

namespace qsat2 {

namespace {

std::string decimal(const mpq_class& q) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", q.get_d());
    return buf;
}

std::string exact_and_decimal(const mpq_class& q) { return q.get_str() + " (" + decimal(q) + ")"; }

std::string join_q(const std::vector<mpq_class>& q) {
    std::string s;
    for (std::size_t k = 0; k < q.size(); ++k) s += (k ? "," : "") + q[k].get_str();
    return s;
}

FactorDistribution distribution_from(const std::string& q, std::size_t f, bool f_given) {
    std::vector<mpq_class> weights = parse_q_list(q, f_given || q == "uniform" ? f : 0);
    return FactorDistribution::with_weights(std::move(weights));
}

std::string options_text(const std::vector<LoopOptionSet>& sets) {
    std::string s;
    for (const auto& o : sets) {
        if (!s.empty()) s += " ";
        s += "{" + std::to_string(o.a + 1);
        if (o.b != o.a) s += "," + std::to_string(o.b + 1);
        s += "}";
    }
    return s;
}

void print_analysis(std::ostream& out, const Instance& inst, const StructureReport& rep, double c) {
    const Graph& g = inst.graph;
    const auto& d = rep.decomposition;
    out << "instance: n=" << g.vertex_count() << " m=" << g.edge_count() << " f=" << inst.f()
        << " model=" << to_string(g.model()) << "\n";
    out << "components: count=" << rep.components.count() << " max=" << rep.components.max_size
        << " multicyclic=" << rep.components.multicyclic_count() << "\n";
    out << "satisfiable: " << (rep.sat.satisfiable ? "yes" : "no") << "\n";
    if (rep.certificate) {
        const auto& cert = *rep.certificate;
        if (cert.loop_based) {
            out << "certificate: loops at vertex " << cert.vertex + 1 << " with option sets " << options_text(cert.sets)
                << " have no common state\n";
        } else if (cert.conflict_variable) {
            const Vertex v = static_cast<Vertex>(*cert.conflict_variable / inst.f());
            const auto h = *cert.conflict_variable % inst.f();
            out << "certificate: implication cycle through vertex " << v + 1 << " factor " << h + 1 << "\n";
        }
    } else {
        out << "loop_option_sets: " << rep.loop_set_count << "\n";
        out << "frozen: " << rep.fixed.count << " core=" << rep.frozen.core_size() << "\n";
        out << "residual_max: " << d.residual_max << "\n";
    }
    out << "cutoff: " << d.cutoff << " (c=" << format_double(c) << ")\n";
    out << "label: " << to_string(d.label) << "\n";

    // per original component: size, class, frozen count, residual max, label
    out << "# component size class frozen residual_max label\n";
    std::vector<std::size_t> residual_in(rep.components.count(), 0);
    for (const auto& r : d.residual) {
        const auto id = rep.components.component_of[r.front()];
        residual_in[id] = std::max(residual_in[id], r.size());
    }
    for (std::size_t id = 0; id < rep.components.count(); ++id) {
        const auto& members = rep.components.members[id];
        std::size_t frozen = 0;
        for (Vertex v : members) frozen += rep.fixed.frozen(v) ? 1 : 0;
        PhaseLabel label;
        if (!rep.sat.satisfiable && !satisfiable(induced_subinstance(inst, members)).satisfiable)
            label = PhaseLabel::frustrated;
        else if (members.size() <= d.cutoff) label = PhaseLabel::highly_disconnected;
        else if (rep.sat.satisfiable && residual_in[id] <= d.cutoff) label = PhaseLabel::highly_decoupled;
        else label = PhaseLabel::unclassified;
        out << "COMPONENT " << id + 1 << " " << members.size() << " " << to_string(rep.components.classes[id]) << " "
            << frozen << " " << (rep.sat.satisfiable ? std::to_string(residual_in[id]) : "NA") << " "
            << to_string(label) << "\n";
    }
}

std::ostream* open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
    if (path.empty() || path == "-") return &fallback;
    file.open(path);
    if (!file) throw UsageError("cannot write '" + path + "'");
    return &file;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Random product-constraint 2-QSAT: generation, structure, exact counting and sweeps", "qsat2"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a random instance file");
    std::string gen_model = "er", gen_q = "uniform", gen_cond = "any", gen_out;
    std::size_t gen_n = 0, gen_m = 0, gen_f = 2;
    std::uint32_t gen_side = 0;
    double gen_p = -1;
    std::uint64_t gen_seed = 0, gen_budget = 10000;
    gen->add_option("--model", gen_model, "er, lat2 or lat3")->check(CLI::IsMember({"er", "lat2", "lat3"}));
    auto* gen_n_opt = gen->add_option("--n", gen_n, "vertices (er)");
    auto* gen_m_opt = gen->add_option("--m", gen_m, "edges (er)");
    auto* gen_l_opt = gen->add_option("--L", gen_side, "lattice side");
    auto* gen_p_opt = gen->add_option("--p", gen_p, "bond probability (lattices)");
    auto* gen_f_opt = gen->add_option("--f", gen_f, "number of factors");
    gen->add_option("--q", gen_q, "'uniform' or a list such as 1/2,1/4,1/4");
    gen->add_option("--cond", gen_cond, "any or ff (frustration-free)")->check(CLI::IsMember({"any", "ff", "free"}));
    gen->add_option("--seed", gen_seed, "seed");
    gen->add_option("--budget", gen_budget, "resample budget per edge (ff)");
    gen->add_option("--out", gen_out, "output file (default stdout)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Structural report of an instance file");
    std::string analyze_file;
    double analyze_c = 3.0;
    analyze->add_option("file", analyze_file, "instance file")->required();
    analyze->add_option("--c", analyze_c, "cutoff constant c in ceil(c log2 n)");

    // count
    auto* count = app.add_subcommand("count", "Exact ground-space dimension of an instance file");
    std::string count_file, count_mode = "modular", count_route = "decoupled";
    std::size_t count_cap = 16;
    unsigned count_threads = 1;
    count->add_option("file", count_file, "instance file")->required();
    count->add_option("--max-component", count_cap, "largest component counted (qubits)");
    count->add_option("--mode", count_mode, "modular or exact")->check(CLI::IsMember({"modular", "exact"}));
    count->add_option("--route", count_route, "decoupled or raw")->check(CLI::IsMember({"decoupled", "raw"}));
    count->add_option("--threads", count_threads, "worker threads");

    // predict
    auto* predict = app.add_subcommand("predict", "Closed-form predictions for a factor distribution");
    std::size_t pred_f = 2, pred_n = 0, pred_m = 0, pred_l = 3;
    std::string pred_q = "uniform", pred_model = "er";
    double pred_gamma = 0, pred_p = 0;
    auto* pred_f_opt = predict->add_option("--f", pred_f, "number of factors");
    predict->add_option("--q", pred_q, "'uniform' or a list such as 1/2,1/4,1/4");
    auto* pred_gamma_opt = predict->add_option("--gamma", pred_gamma, "edge density m/n (er)");
    predict->add_option("--model", pred_model, "er, lat2 or lat3")->check(CLI::IsMember({"er", "lat2", "lat3"}));
    predict->add_option("--n", pred_n, "vertex count");
    auto* pred_p_opt = predict->add_option("--p", pred_p, "bond probability (lattices)");
    auto* pred_m_opt = predict->add_option("--m", pred_m, "edge count for the figure-eight mean (er)");
    predict->add_option("--l", pred_l, "figure-eight cycle length");

    // xi
    auto* xi_cmd = app.add_subcommand("xi", "Tree fraction function xi(rho)");
    double xi_rho = 0;
    xi_cmd->add_option("rho", xi_rho, "rho >= 0")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep to CSV");
    std::string sweep_config, sweep_out;
    unsigned sweep_threads = 0;
    sweep->add_option("--config", sweep_config, "key=value config file")->required();
    sweep->add_option("--out", sweep_out, "CSV output (default stdout)");
    auto* sweep_threads_opt = sweep->add_option("--threads", sweep_threads, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*gen) {
            GenerateSpec spec;
            spec.model = parse_graph_model(gen_model);
            spec.dist = distribution_from(gen_q, gen_f, gen_f_opt->count() > 0);
            spec.cond = gen_cond == "any" ? Conditioning::any : Conditioning::frustration_free;
            spec.budget = gen_budget;
            if (spec.model == GraphModel::er) {
                if (!*gen_n_opt || !*gen_m_opt) throw UsageError("er instances need --n and --m");
                spec.n = gen_n;
                spec.m = gen_m;
            } else {
                if (!*gen_l_opt || !*gen_p_opt) throw UsageError("lattice instances need --L and --p");
                spec.side = gen_side;
                spec.p = gen_p;
            }
            const Instance inst = generate_instance(spec, gen_seed);
            std::ofstream file;
            write_instance(*open_output(gen_out, file, out), inst);
            return 0;
        }
        if (*analyze) {
            const Instance inst = load_instance(analyze_file);
            print_analysis(out, inst, analyze_structure(inst, analyze_c, true), analyze_c);
            return 0;
        }
        if (*count) {
            const Instance inst = load_instance(count_file);
            RankBackendConfig cfg;
            cfg.mode = count_mode == "exact" ? RankMode::exact_rational : RankMode::modular;
            cfg.max_component_qubits = count_cap;
            cfg.threads = std::max(1U, count_threads);
            if (count_cap > 16)
                err << "warning: components up to " << count_cap << " qubits; cost grows like 4^k\n";
            InstanceValue v;
            try {
                v = instance_value(inst, cfg, count_route == "raw" ? ValueRoute::raw : ValueRoute::decoupled);
            } catch (const ComponentCapError& e) {
                err << "error: component " << e.component_id() + 1 << " has " << e.size()
                    << " qubits, above the cap of " << e.cap() << " (raise with --max-component)\n";
                return 4;
            }
            if (v.frustrated) {
                out << "VALUE 0 FRUSTRATED\n";
                return 0;
            }
            for (const auto& c : v.components) out << "C " << c.id + 1 << " " << c.qubits << " " << c.value.get_str() << "\n";
            out << "VALUE " << v.value.get_str() << "\n";
            return 0;
        }
        if (*predict) {
            const FactorDistribution dist = distribution_from(pred_q, pred_f, pred_f_opt->count() > 0);
            const auto fn = functionals(dist);
            const GraphModel model = parse_graph_model(pred_model);
            out << "f=" << dist.size() << " q=" << join_q(dist.q()) << "\n";
            out << "norm2 = " << exact_and_decimal(fn.norm2) << "\n";
            out << "norm3 = " << exact_and_decimal(fn.norm3) << "\n";
            out << "norm4 = " << exact_and_decimal(fn.norm4) << "\n";
            out << "norm_inf = " << exact_and_decimal(fn.norm_inf) << "\n";
            out << "Q2 = " << exact_and_decimal(fn.Q2) << "\n";
            out << "Qinf = " << exact_and_decimal(fn.Qinf) << "\n";
            out << "Qcrux = " << exact_and_decimal(fn.Qcrux) << "\n";
            out << "Qjunct = " << exact_and_decimal(fn.Qjunct) << "\n";
            std::optional<double> x;
            if (model == GraphModel::er && *pred_gamma_opt) x = pred_gamma;
            if (model != GraphModel::er && *pred_p_opt) x = pred_p;
            const auto rep = thresholds(dist, model, pred_n, x);
            out << "model = " << to_string(model) << "\n";
            out << "gamma_disconnect = " << exact_and_decimal(rep.gamma_disconnect) << "\n";
            out << "gamma_frustrate = " << (rep.gamma_frustrate ? exact_and_decimal(*rep.gamma_frustrate) : "unbounded")
                << "\n";
            if (rep.gamma) {
                const double qinf = fn.Qinf.get_d();
                out << "gamma = " << format_double(*rep.gamma) << "\n";
                out << "decouple_condition = " << format_double(*rep.decouple_condition)
                    << (*rep.decouple_condition > 1 ? " (> 1)" : " (<= 1)") << "\n";
                if (qinf > 0) {
                    out << "xi(gamma*Qinf) = " << format_double(xi(*rep.gamma * qinf)) << "\n";
                    out << "residual_density = " << format_double(residual_density(*rep.gamma, qinf)) << "\n";
                    out << "frozen_core_fraction = " << format_double(frozen_core_fraction(*rep.gamma, qinf)) << "\n";
                }
            }
            if (rep.p_c) out << "p_c = " << format_double(*rep.p_c) << "\n";
            if (model != GraphModel::er) out << "p_fin = " << (rep.p_fin ? format_double(*rep.p_fin) : "unknown") << "\n";
            if (rep.domino_scale) out << "domino_scale = " << format_double(*rep.domino_scale) << "\n";
            if (rep.domino_presence) out << "domino_presence = " << format_double(*rep.domino_presence) << "\n";
            if (model == GraphModel::er && pred_n > 0 && *pred_m_opt) {
                out << "expected_figure_eights(l=" << pred_l
                    << ") = " << exact_and_decimal(expected_figure_eights(pred_n, pred_m, pred_l, fn)) << "\n";
            }
            return 0;
        }
        if (*xi_cmd) {
            out << format_double(xi(xi_rho)) << "\n";
            return 0;
        }
        if (*sweep) {
            SweepConfig cfg = load_sweep_config(sweep_config);
            if (*sweep_threads_opt) cfg.threads = std::max(1U, sweep_threads);
            const SweepResult result = run_sweep(cfg);
            std::ofstream file;
            std::ostream* os = open_output(sweep_out, file, out);
            write_csv(*os, result);
            if (!*os) throw UsageError("failed writing CSV");
            return 0;
        }
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ComponentCapError& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace qsat2
