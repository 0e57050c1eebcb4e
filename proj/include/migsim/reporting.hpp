#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "migsim/sim_engine.hpp"

namespace migsim {

inline constexpr const char* kVersion = "0.1.0";

// One batch experiment: the cross product of distributions x schedulers run
// with shared simulation parameters.
struct ExperimentSpec {
    int cluster_size = 100;
    int runs = 500;
    std::uint64_t seed = 0;
    std::vector<std::string> distributions; // builtin names
    std::vector<std::string> schedulers;    // mfi, ff, rr, bf-bi, wf-bi
    std::vector<double> snapshot_grid = default_snapshot_grid();
    bool strict_first_choice = true;
    int parallelism = 0;
    std::string out_dir = "results";
    std::vector<std::string> formats = {"csv", "json"}; // subset of {csv, json}
};

// Throws std::invalid_argument with a diagnostic on any invalid field.
ExperimentSpec parse_spec(const nlohmann::json& j);
ExperimentSpec load_spec(const std::filesystem::path& path);
nlohmann::json spec_to_json(const ExperimentSpec& spec);

struct CellResult {
    std::string distribution;
    std::string scheduler;
    BatchResult batch;
};

std::vector<CellResult> run_experiment(const ExperimentSpec& spec);

// Deterministic serializations: same spec + seed give byte-identical bodies.
std::string cell_csv(const CellResult& cell);
nlohmann::json cell_json(const CellResult& cell);

// Writes per-cell result files plus manifest.json (spec echo, seeds, rng id,
// version). Returns the paths written.
std::vector<std::filesystem::path> write_results(const ExperimentSpec& spec,
                                                 const std::vector<CellResult>& cells);

// Aggregate metrics of one cell at one demand point, as loaded back from a
// result file.
struct ComparisonRow {
    std::string distribution;
    std::string scheduler;
    int cluster_size = 0;
    double grid_pct = 0.0;
    double acceptance_rate = 0.0;        // cumulative up to the demand point
    double window_acceptance_rate = 0.0; // over the grid interval ending there
    double accepted = 0.0;
    double utilization_pct = 0.0;
    double active_gpus_pct = 0.0;
    double frag_severity = 0.0; // time-averaged over the whole run
};

struct ComparisonTable {
    double demand_point = 0.0;
    std::vector<ComparisonRow> rows;
};

// Loads cell JSON result files and picks the snapshot nearest the demand
// point. Throws std::invalid_argument when files disagree on cluster size.
ComparisonTable compare_results(const std::vector<std::filesystem::path>& files,
                                double demand_point);
ComparisonTable build_comparison(const std::vector<CellResult>& cells, double demand_point);

std::string render_comparison(const ComparisonTable& table, bool normalized);
std::string comparison_csv(const ComparisonTable& table, bool normalized);

// Long-format plot data, one file per figure analogue:
//   acceptance_vs_demand.csv, window_acceptance_vs_demand.csv,
//   scheduled_vs_demand.csv, utilization_vs_demand.csv,
//   active_gpus_vs_demand.csv, frag_severity_bars.csv
std::vector<std::filesystem::path> write_plot_data(
    const std::vector<std::filesystem::path>& result_files,
    const std::filesystem::path& out_dir);

// Occupancy inspection report: free slices, score with per-(profile, index)
// breakdown, and optionally the per-index dry-run delta table for a profile.
std::string inspect_report(const std::string& occupancy, const std::string& profile_name);

} // namespace migsim
