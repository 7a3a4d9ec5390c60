#pragma once

// Seeded Monte Carlo sweeps over edge density (or bond probability) with
// deterministic CSV output independent of the worker count.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qsat2/counting.hpp"
#include "qsat2/instance.hpp"
#include "qsat2/structure.hpp"

namespace qsat2 {

// Avalanche mix of (master, grid index, trial index); bijective in the trial
// index for fixed master and grid index.
std::uint64_t derive_trial_seed(std::uint64_t master, std::uint64_t grid_index, std::uint64_t trial_index);

struct SweepConfig {
    GraphModel model = GraphModel::er;
    std::size_t n = 0;           // er
    std::uint32_t side = 0;      // lattices
    std::vector<double> grid;    // m/n for er, bond probability for lattices
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::size_t f = 2;
    std::string q = "uniform";
    Conditioning cond = Conditioning::any;
    double cutoff_c = 3.0;
    std::size_t max_component_qubits = 16;
    bool compute_value = true;
    bool figure_eights = false;  // frustrated figure eights with l = 3
    bool timing = false;
    std::uint64_t budget = 10000;
    unsigned threads = 1;

    FactorDistribution distribution() const;
    // Throws UsageError on inconsistent settings.
    void validate() const;
};

// `key=value` lines; blank lines and `#` comments ignored. Unknown keys and
// malformed values raise UsageError.
SweepConfig parse_sweep_config(std::istream& is);
SweepConfig load_sweep_config(const std::string& path);

struct TrialRecord {
    std::size_t grid_index = 0;
    double grid = 0.0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::size_t m = 0;
    bool frustrated = false;
    std::size_t max_comp = 0;
    std::size_t multicyclic = 0;
    std::size_t frozen_core = 0;
    std::size_t residual_max = 0;
    PhaseLabel label = PhaseLabel::unclassified;
    std::optional<std::size_t> fig8_l3;
    std::optional<std::size_t> dominoes;
    std::string value = "NA";  // log2 of the value, -inf, NA or NA:<blocking size>
    std::uint64_t resamples = 0;
    std::optional<double> ms;
    std::optional<std::string> error;  // trial failed; measurement columns are NA
};

struct GridSummary {
    std::size_t grid_index = 0;
    double grid = 0.0;
    std::size_t trials = 0;  // successful trials
    double frustrated_fraction = 0.0;
    double mean_max_comp = 0.0;
    double mean_frozen_fraction = 0.0;
};

struct SweepResult {
    std::vector<TrialRecord> records;  // sorted by (grid, trial)
    std::vector<GridSummary> summaries;
};

// One trial, as the sweep runs it.
TrialRecord run_trial(const SweepConfig& cfg, std::size_t grid_index, std::size_t trial);
// The instance a trial analyzes, reproducible from the row's seed.
Instance trial_instance(const SweepConfig& cfg, double grid_value, std::uint64_t seed);

SweepResult run_sweep(const SweepConfig& cfg);

GridSummary summarize(std::size_t grid_index, double grid, const std::vector<TrialRecord>& rows);

inline constexpr const char* kCsvHeader =
    "grid,trial,seed,n,m,frustrated,max_comp,multicyclic,frozen_core,residual_max,label,fig8_l3,dominoes,value,"
    "resamples,ms";

void write_csv(std::ostream& os, const SweepResult& result);

// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

// log2 of a positive big natural, six decimals.
std::string format_log2(const BigNat& v);

}  // namespace qsat2
