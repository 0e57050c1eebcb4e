#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "migsim/fragmentation.hpp"
#include "migsim/reporting.hpp"

namespace {

using namespace migsim;

int cmd_run(const std::string& spec_path, const std::string& seed_opt,
            const std::string& runs_opt, const std::string& cluster_opt,
            const std::vector<std::string>& schedulers,
            const std::vector<std::string>& distributions, int strict, const std::string& out,
            const std::vector<std::string>& formats, int parallelism) {
    ExperimentSpec spec;
    if (!spec_path.empty())
        spec = load_spec(spec_path);
    else
        spec.distributions = builtin_distribution_names();
    if (!seed_opt.empty()) spec.seed = std::stoull(seed_opt);
    if (!runs_opt.empty()) spec.runs = std::stoi(runs_opt);
    if (!cluster_opt.empty()) spec.cluster_size = std::stoi(cluster_opt);
    if (!schedulers.empty()) spec.schedulers = schedulers;
    if (!distributions.empty()) spec.distributions = distributions;
    if (strict >= 0) spec.strict_first_choice = strict != 0;
    if (!out.empty()) spec.out_dir = out;
    if (!formats.empty()) spec.formats = formats;
    if (parallelism > 0) spec.parallelism = parallelism;
    if (const char* env = std::getenv("MIGSIM_OUT_DIR"); env && out.empty()) spec.out_dir = env;
    if (const char* env = std::getenv("MIGSIM_PARALLELISM"); env && parallelism == 0)
        spec.parallelism = std::atoi(env);

    // revalidate after overrides
    spec = parse_spec(spec_to_json(spec));

    auto cells = run_experiment(spec);
    auto files = write_results(spec, cells);
    std::cout << "wrote " << files.size() << " files to " << spec.out_dir << '\n';
    return 0;
}

int cmd_compare(const std::vector<std::string>& files, double demand_point,
                const std::string& out, const std::string& format) {
    std::vector<std::filesystem::path> paths(files.begin(), files.end());
    ComparisonTable table = compare_results(paths, demand_point);
    std::cout << render_comparison(table, /*normalized=*/false);
    std::cout << '\n' << render_comparison(table, /*normalized=*/true);
    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot write " + out);
        if (format == "json") {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& r : table.rows) {
                rows.push_back({{"distribution", r.distribution},
                                {"scheduler", r.scheduler},
                                {"grid_pct", r.grid_pct},
                                {"acceptance_rate", r.acceptance_rate},
                                {"accepted", r.accepted},
                                {"utilization_pct", r.utilization_pct},
                                {"active_gpus_pct", r.active_gpus_pct},
                                {"frag_severity", r.frag_severity}});
            }
            f << nlohmann::json{{"demand_point", table.demand_point}, {"rows", rows}}.dump(2)
              << '\n';
        } else {
            f << comparison_csv(table, /*normalized=*/false);
        }
    }
    return 0;
}

int cmd_validate() {
    // oracle equivalence over every occupancy vector
    for (int mask = 0; mask < 256; ++mask) {
        std::array<bool, 8> occ{};
        for (int i = 0; i < 8; ++i) occ[i] = (mask >> i) & 1;
        int expected = frag_score_oracle(occ);
        int got = frag_score(static_cast<OccupancyMask>(mask));
        if (got != expected) {
            std::cerr << "FAIL oracle mismatch at " << occupancy_to_string(mask) << ": "
                      << got << " != " << expected << '\n';
            return 1;
        }
        if (got < 0 || got > 41) {
            std::cerr << "FAIL score bound violated at " << occupancy_to_string(mask) << '\n';
            return 1;
        }
    }
    std::cout << "oracle equivalence: 256/256 occupancy vectors OK\n";

    // allocate/release reversibility spot checks
    Rng rng(1);
    for (int trial = 0; trial < 1000; ++trial) {
        GpuState gpu(0);
        std::uint64_t next_id = 0;
        for (int step = 0; step < 16; ++step) {
            const auto& catalog = profile_catalog();
            const MigProfile& p = catalog[rng.next_int(0, 5)];
            int start = p.feasible_indexes[rng.next_int(
                0, static_cast<int>(p.feasible_indexes.size()) - 1)];
            if (!gpu.span_free(start, p.mem_slices)) continue;
            OccupancyMask before = gpu.mask();
            gpu.allocate(p, start, next_id);
            gpu.release(next_id);
            if (gpu.mask() != before) {
                std::cerr << "FAIL allocate/release not reversible\n";
                return 1;
            }
            gpu.allocate(p, start, next_id++);
        }
    }
    std::cout << "allocate/release reversibility: 1000 random sequences OK\n";
    std::cout << "validate: all checks passed\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MIG fragmentation-aware scheduling simulator"};
    app.require_subcommand(1);

    std::string spec_path, seed_opt, runs_opt, cluster_opt, out_dir;
    std::vector<std::string> schedulers, distributions, formats;
    int parallelism = 0;

    auto* run = app.add_subcommand("run", "Run a batch experiment");
    run->add_option("--spec", spec_path, "Experiment spec file (JSON)");
    run->add_option("--seed", seed_opt, "Base seed override");
    run->add_option("--runs", runs_opt, "Runs per cell override");
    run->add_option("--cluster-size", cluster_opt, "GPUs in the cluster");
    run->add_option("--scheduler", schedulers, "Scheduler(s): mfi ff rr bf-bi wf-bi");
    run->add_option("--distribution", distributions,
                    "Distribution(s): uniform skew-small skew-big bimodal");
    auto* strict_on = run->add_flag("--strict-first-choice",
                                    "Baselines commit to their first GPU pick (default)");
    auto* strict_off = run->add_flag(
        "--no-strict-first-choice",
        "Baselines fall through to the next GPU that can host the profile");
    strict_on->excludes(strict_off);
    strict_off->excludes(strict_on);
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--format", formats, "Output formats: csv json");
    run->add_option("--parallelism", parallelism, "Worker threads (0 = hardware)");

    std::vector<std::string> result_files;
    double demand_point = 85.0;
    std::string compare_out, compare_format = "csv";
    auto* compare = app.add_subcommand("compare", "Tabulate cells at a demand point");
    compare->add_option("files", result_files, "Cell result JSON files")->required();
    compare->add_option("--demand-point", demand_point, "Demand percentage");
    compare->add_option("--out", compare_out, "Export file");
    compare->add_option("--format", compare_format, "Export format: csv json");

    std::string occupancy, inspect_profile;
    auto* inspect = app.add_subcommand("inspect", "Score one occupancy string");
    inspect->add_option("occupancy", occupancy, "8 chars over {., #}, e.g. .#......")
        ->required();
    inspect->add_option("--profile", inspect_profile, "Profile for the dry-run delta table");

    std::vector<std::string> plot_files;
    std::string plot_out = "plots";
    auto* plot = app.add_subcommand("plot-data", "Emit plot-ready data files");
    plot->add_option("files", plot_files, "Cell result JSON files")->required();
    plot->add_option("--out", plot_out, "Output directory");

    app.add_subcommand("validate", "Run oracle-equivalence and invariant checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            int strict = strict_on->count() ? 1 : (strict_off->count() ? 0 : -1);
            return cmd_run(spec_path, seed_opt, runs_opt, cluster_opt, schedulers,
                           distributions, strict, out_dir, formats, parallelism);
        }
        if (compare->parsed())
            return cmd_compare(result_files, demand_point, compare_out, compare_format);
        if (inspect->parsed()) {
            std::cout << migsim::inspect_report(occupancy, inspect_profile);
            return 0;
        }
        if (plot->parsed()) {
            auto written = migsim::write_plot_data(
                std::vector<std::filesystem::path>(plot_files.begin(), plot_files.end()),
                plot_out);
            std::cout << "wrote " << written.size() << " files to " << plot_out << '\n';
            return 0;
        }
        return cmd_validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
