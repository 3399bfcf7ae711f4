#pragma once

// Experiment orchestration over generated grids, result tables, CSV/JSON
// export and the SVG curve plot.

#include "mvbm/gen.hpp"
#include "mvbm/mechanisms.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace mvbm {

enum class ExperimentKind { CompareFirstAgent, MpugCurve, PmaPmi, RandomizedVsDeterministic };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

inline constexpr std::size_t kDefaultIterations = 250;
inline constexpr std::size_t kFastIterations = 50;

struct CapacityRange {
    int low = 1;
    int high = 1;

    friend bool operator==(const CapacityRange&, const CapacityRange&) = default;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::CompareFirstAgent;
    std::vector<int> ns;
    std::vector<int> ms;
    std::vector<double> ps;
    std::vector<CapacityRange> capacities;
    std::size_t iterations = kDefaultIterations;
    std::vector<double> thresholds{1.5, 2.0, 2.5, 3.0};
    std::vector<int> orders{2, 3, 4};
    std::size_t mc_trials = 250;
    std::uint64_t seed = 20240601;
    double value_mean = 3.0;
    double value_sigma = 0.77;
    std::optional<std::string> csv_path;
    std::optional<std::string> json_path;
    std::optional<std::string> svg_path;

    /// Grid defaults of each experiment.
    static ExperimentConfig defaults(ExperimentKind kind);

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

void validate_experiment_config(const ExperimentConfig& cfg);

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);

/// Fields missing from `j` keep the defaults of the kind. The kind comes from
/// j["kind"] or, failing that, from `kind`. Unknown keys are errors.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             std::optional<ExperimentKind> kind = std::nullopt);

struct GridCell {
    int n = 0;
    int m = 0;
    double p = 0.0;
    CapacityRange capacity;
};

/// Cells in n, m, p, capacity-range nesting order.
std::vector<GridCell> grid_cells(const ExperimentConfig& cfg);

/// Generator settings of one cell. The seed depends only on the experiment
/// seed and the cell parameters, so a cell reproduces outside its grid.
GenConfig cell_gen_config(const ExperimentConfig& cfg, const GridCell& cell);

struct Metric {
    std::string name;
    double value = 0.0;
    std::optional<double> std_error; // absent below 2 samples
    std::size_t samples = 0;

    friend bool operator==(const Metric&, const Metric&) = default;
};

struct ResultRow {
    int n = 0;
    int m = 0;
    double p = 0.0;
    int b_low = 1;
    int b_high = 1;
    std::size_t iterations = 0;
    std::vector<Metric> metrics;

    const Metric& metric(const std::string& name) const;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ResultsTable {
    ExperimentKind kind = ExperimentKind::CompareFirstAgent;
    std::uint64_t seed = 0;
    nlohmann::json config;
    std::vector<ResultRow> rows;

    friend bool operator==(const ResultsTable&, const ResultsTable&) = default;
};

/// Mean and stderr = sample std / sqrt(count); stderr absent below 2 samples.
Metric summarize(const std::string& name, const std::vector<double>& samples);

/// Runs every (cell, instance) job with up to `workers` threads. The table
/// does not depend on `workers`.
ResultsTable run_experiment(const ExperimentConfig& cfg, int workers);

/// Truthful-over-best utility ratio of agent 0 under MBFS and MDFS. 0/0 = 1;
/// an isolated agent 0 has ratio 1.
struct FirstAgentRatios {
    double mbfs = 1.0;
    double mdfs = 1.0;
};
FirstAgentRatios first_agent_ratios(const Instance& inst);

struct Manipulability {
    bool mbfs = false;             // some agent gains (agent 0 by TopB, others by KOrder)
    bool mbfs_first_agent = false; // agent 0 gains by TopB
    bool mrbfs = false;            // some agent's mean gain exceeds 2 paired standard errors
};

/// The randomized-vs-deterministic test on one instance. Trial k of every
/// report uses the substream (mc_seed, k).
Manipulability manipulability(const Instance& inst, const std::vector<int>& orders,
                              std::size_t mc_trials, std::uint64_t mc_seed);

enum class ExportFormat { Csv, Json };

/// Header n,m,p,b_low,b_high,iterations,metric,value,stderr,seed and one line
/// per (row, metric). Reals use 6 fixed decimals.
std::string results_to_csv(const ResultsTable& table);
nlohmann::json results_to_json(const ResultsTable& table);
ResultsTable results_from_json(const nlohmann::json& j);
void export_results(const ResultsTable& table, ExportFormat format, const std::filesystem::path& path);

/// Mean MPUG against m, one polyline per n. Requires an mpug-curve table.
std::string render_plot_svg(const ResultsTable& table);
void render_plot(const ResultsTable& table, const std::filesystem::path& path);

} // namespace mvbm
