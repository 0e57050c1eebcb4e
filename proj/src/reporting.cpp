#include "migsim/reporting.hpp"

#include <algorithm>
#include <charconv>
#include <iterator>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "migsim/fragmentation.hpp"

namespace migsim {

namespace {

// Locale-independent fixed-point formatting, so CSV bodies are byte-stable.
std::string fmt(double value, int precision = 6) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed,
                                   precision);
    return std::string(buf, ptr);
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

nlohmann::json aggregate_to_json(const SnapshotAggregate& a) {
    return {
        {"grid_pct", a.grid_pct},
        {"runs", a.runs},
        {"acceptance_rate_mean", a.acceptance_rate_mean},
        {"acceptance_rate_std", a.acceptance_rate_std},
        {"window_acceptance_mean", a.window_acceptance_mean},
        {"window_acceptance_std", a.window_acceptance_std},
        {"accepted_mean", a.accepted_mean},
        {"accepted_std", a.accepted_std},
        {"utilization_mean", a.utilization_mean},
        {"utilization_std", a.utilization_std},
        {"active_gpus_mean", a.active_gpus_mean},
        {"active_gpus_std", a.active_gpus_std},
        {"frag_severity_mean", a.frag_severity_mean},
        {"frag_severity_std", a.frag_severity_std},
    };
}

SnapshotAggregate aggregate_from_json(const nlohmann::json& j) {
    SnapshotAggregate a;
    a.grid_pct = j.at("grid_pct");
    a.runs = j.at("runs");
    a.acceptance_rate_mean = j.at("acceptance_rate_mean");
    a.acceptance_rate_std = j.at("acceptance_rate_std");
    a.window_acceptance_mean = j.at("window_acceptance_mean");
    a.window_acceptance_std = j.at("window_acceptance_std");
    a.accepted_mean = j.at("accepted_mean");
    a.accepted_std = j.at("accepted_std");
    a.utilization_mean = j.at("utilization_mean");
    a.utilization_std = j.at("utilization_std");
    a.active_gpus_mean = j.at("active_gpus_mean");
    a.active_gpus_std = j.at("active_gpus_std");
    a.frag_severity_mean = j.at("frag_severity_mean");
    a.frag_severity_std = j.at("frag_severity_std");
    return a;
}

std::string cell_stem(const CellResult& cell) {
    std::string sched = cell.scheduler;
    std::replace(sched.begin(), sched.end(), '-', '_');
    std::string dist = cell.distribution;
    std::replace(dist.begin(), dist.end(), '-', '_');
    return dist + "__" + sched;
}

} // namespace

ExperimentSpec parse_spec(const nlohmann::json& j) {
    ExperimentSpec spec;
    spec.cluster_size = j.value("cluster_size", spec.cluster_size);
    spec.runs = j.value("runs", spec.runs);
    spec.seed = j.value("seed", spec.seed);
    spec.strict_first_choice = j.value("strict_first_choice", spec.strict_first_choice);
    spec.parallelism = j.value("parallelism", spec.parallelism);
    spec.out_dir = j.value("out_dir", spec.out_dir);
    if (j.contains("distributions"))
        spec.distributions = j.at("distributions").get<std::vector<std::string>>();
    else
        spec.distributions = builtin_distribution_names();
    if (j.contains("schedulers"))
        spec.schedulers = j.at("schedulers").get<std::vector<std::string>>();
    else
        spec.schedulers = scheduler_names();
    if (j.contains("snapshot_grid"))
        spec.snapshot_grid = j.at("snapshot_grid").get<std::vector<double>>();
    if (j.contains("formats")) spec.formats = j.at("formats").get<std::vector<std::string>>();

    require(spec.cluster_size >= 1, "cluster_size must be >= 1");
    require(spec.runs >= 1, "runs must be >= 1");
    require(!spec.distributions.empty(), "at least one distribution is required");
    require(!spec.schedulers.empty(), "at least one scheduler is required");
    for (const auto& d : spec.distributions) builtin_distribution(d); // throws on unknown
    for (const auto& s : spec.schedulers) scheduler_from_name(s);
    require(!spec.snapshot_grid.empty(), "snapshot_grid must not be empty");
    for (double g : spec.snapshot_grid)
        require(g > 0.0 && g <= 100.0, "snapshot_grid values must be in (0, 100]");
    require(std::is_sorted(spec.snapshot_grid.begin(), spec.snapshot_grid.end()),
            "snapshot_grid must be ascending");
    for (const auto& f : spec.formats)
        require(f == "csv" || f == "json", "formats entries must be csv or json");
    return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open spec file: " + path.string());
    nlohmann::json j;
    in >> j;
    return parse_spec(j);
}

nlohmann::json spec_to_json(const ExperimentSpec& spec) {
    return {
        {"cluster_size", spec.cluster_size},
        {"runs", spec.runs},
        {"seed", spec.seed},
        {"distributions", spec.distributions},
        {"schedulers", spec.schedulers},
        {"snapshot_grid", spec.snapshot_grid},
        {"strict_first_choice", spec.strict_first_choice},
        {"parallelism", spec.parallelism},
        {"out_dir", spec.out_dir},
        {"formats", spec.formats},
    };
}

std::vector<CellResult> run_experiment(const ExperimentSpec& spec) {
    std::vector<CellResult> cells;
    for (const auto& dist_name : spec.distributions) {
        for (const auto& sched_name : spec.schedulers) {
            SimConfig config;
            config.cluster_size = spec.cluster_size;
            config.distribution = builtin_distribution(dist_name);
            config.scheduler = scheduler_from_name(sched_name);
            config.runs = spec.runs;
            config.seed = spec.seed;
            config.snapshot_grid = spec.snapshot_grid;
            config.policy.strict_first_choice = spec.strict_first_choice;
            config.parallelism = spec.parallelism;
            cells.push_back({dist_name, sched_name, run_batch(config)});
        }
    }
    return cells;
}

std::string cell_csv(const CellResult& cell) {
    std::ostringstream out;
    out << "run,slot,grid_pct,demand_pct,scheduler,distribution,arrived,accepted,"
           "acceptance_rate,window_acceptance_rate,utilization_pct,active_gpus_pct,"
           "frag_severity\n";
    for (const auto& run : cell.batch.runs) {
        for (const auto& s : run.snapshots) {
            out << run.run_index << ',' << s.slot << ',' << fmt(s.grid_pct, 2) << ','
                << fmt(s.demand_pct, 4) << ',' << cell.scheduler << ',' << cell.distribution
                << ',' << s.arrived << ',' << s.accepted << ',' << fmt(s.acceptance_rate) << ','
                << fmt(s.window_acceptance_rate) << ',' << fmt(s.utilization_pct) << ','
                << fmt(s.active_gpus_pct) << ',' << fmt(s.frag_severity) << '\n';
        }
    }
    return out.str();
}

nlohmann::json cell_json(const CellResult& cell) {
    nlohmann::json aggs = nlohmann::json::array();
    for (const auto& a : cell.batch.aggregate) aggs.push_back(aggregate_to_json(a));
    nlohmann::json run_seeds = nlohmann::json::array();
    for (const auto& run : cell.batch.runs) run_seeds.push_back(run.seed);
    return {
        {"version", kVersion},
        {"rng", kRngId},
        {"distribution", cell.distribution},
        {"scheduler", cell.scheduler},
        {"cluster_size", cell.batch.config.cluster_size},
        {"runs", cell.batch.config.runs},
        {"seed", cell.batch.config.seed},
        {"strict_first_choice", cell.batch.config.policy.strict_first_choice},
        {"run_seeds", run_seeds},
        {"mean_frag_severity", cell.batch.mean_frag_severity},
        {"aggregate", aggs},
    };
}

std::vector<std::filesystem::path> write_results(const ExperimentSpec& spec,
                                                 const std::vector<CellResult>& cells) {
    namespace fs = std::filesystem;
    const fs::path dir(spec.out_dir);
    fs::create_directories(dir);

    std::vector<fs::path> written;
    nlohmann::json manifest_cells = nlohmann::json::array();
    const bool want_csv =
        std::find(spec.formats.begin(), spec.formats.end(), "csv") != spec.formats.end();
    const bool want_json =
        std::find(spec.formats.begin(), spec.formats.end(), "json") != spec.formats.end();

    for (const auto& cell : cells) {
        nlohmann::json entry = {{"distribution", cell.distribution},
                                {"scheduler", cell.scheduler}};
        if (want_csv) {
            fs::path p = dir / (cell_stem(cell) + ".csv");
            std::ofstream out(p);
            if (!out) throw std::runtime_error("cannot write " + p.string());
            out << cell_csv(cell);
            written.push_back(p);
            entry["csv"] = p.filename().string();
        }
        if (want_json) {
            fs::path p = dir / (cell_stem(cell) + ".json");
            std::ofstream out(p);
            if (!out) throw std::runtime_error("cannot write " + p.string());
            out << cell_json(cell).dump(2) << '\n';
            written.push_back(p);
            entry["json"] = p.filename().string();
        }
        manifest_cells.push_back(entry);
    }

    nlohmann::json manifest = {
        {"version", kVersion},
        {"rng", kRngId},
        {"seed_derivation", "run seed = splitmix64(base ^ splitmix64(run_index))"},
        {"spec", spec_to_json(spec)},
        {"cells", manifest_cells},
    };
    fs::path mp = dir / "manifest.json";
    std::ofstream mout(mp);
    if (!mout) throw std::runtime_error("cannot write " + mp.string());
    mout << manifest.dump(2) << '\n';
    written.push_back(mp);
    return written;
}

ComparisonTable build_comparison(const std::vector<CellResult>& cells, double demand_point) {
    ComparisonTable table;
    table.demand_point = demand_point;
    for (const auto& cell : cells) {
        require(!cell.batch.aggregate.empty(), "cell has no snapshots: " + cell_stem(cell));
        const SnapshotAggregate* nearest = &cell.batch.aggregate.front();
        for (const auto& a : cell.batch.aggregate) {
            if (std::abs(a.grid_pct - demand_point) <
                std::abs(nearest->grid_pct - demand_point))
                nearest = &a;
        }
        ComparisonRow row;
        row.distribution = cell.distribution;
        row.scheduler = cell.scheduler;
        row.cluster_size = cell.batch.config.cluster_size;
        row.grid_pct = nearest->grid_pct;
        row.acceptance_rate = nearest->acceptance_rate_mean;
        row.window_acceptance_rate = nearest->window_acceptance_mean;
        row.accepted = nearest->accepted_mean;
        row.utilization_pct = nearest->utilization_mean;
        row.active_gpus_pct = nearest->active_gpus_mean;
        row.frag_severity = cell.batch.mean_frag_severity;
        table.rows.push_back(row);
    }
    return table;
}

ComparisonTable compare_results(const std::vector<std::filesystem::path>& files,
                                double demand_point) {
    require(!files.empty(), "no result files given");
    ComparisonTable table;
    table.demand_point = demand_point;
    int cluster_size = -1;
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) throw std::invalid_argument("cannot open result file: " + file.string());
        nlohmann::json j;
        in >> j;
        int m = j.at("cluster_size");
        if (cluster_size < 0)
            cluster_size = m;
        else
            require(m == cluster_size, "result files disagree on cluster_size");

        std::vector<SnapshotAggregate> aggs;
        for (const auto& aj : j.at("aggregate")) aggs.push_back(aggregate_from_json(aj));
        require(!aggs.empty(), "result file has no snapshots: " + file.string());
        const SnapshotAggregate* nearest = &aggs.front();
        for (const auto& a : aggs) {
            if (std::abs(a.grid_pct - demand_point) <
                std::abs(nearest->grid_pct - demand_point))
                nearest = &a;
        }
        ComparisonRow row;
        row.distribution = j.at("distribution");
        row.scheduler = j.at("scheduler");
        row.cluster_size = m;
        row.grid_pct = nearest->grid_pct;
        row.acceptance_rate = nearest->acceptance_rate_mean;
        row.window_acceptance_rate = nearest->window_acceptance_mean;
        row.accepted = nearest->accepted_mean;
        row.utilization_pct = nearest->utilization_mean;
        row.active_gpus_pct = nearest->active_gpus_mean;
        row.frag_severity = j.at("mean_frag_severity");
        table.rows.push_back(row);
    }
    return table;
}

namespace {

struct MetricColumn {
    const char* header;
    double ComparisonRow::*field;
};

constexpr MetricColumn kColumns[] = {
    {"acceptance_rate", &ComparisonRow::acceptance_rate},
    {"window_acceptance_rate", &ComparisonRow::window_acceptance_rate},
    {"accepted", &ComparisonRow::accepted},
    {"utilization_pct", &ComparisonRow::utilization_pct},
    {"active_gpus_pct", &ComparisonRow::active_gpus_pct},
    {"frag_severity", &ComparisonRow::frag_severity},
};

constexpr std::size_t kNumColumns = std::size(kColumns);

std::array<double, kNumColumns> column_maxima(const ComparisonTable& table) {
    std::array<double, kNumColumns> maxima{};
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < kNumColumns; ++c)
            maxima[c] = std::max(maxima[c], row.*(kColumns[c].field));
    }
    return maxima;
}

} // namespace

std::string render_comparison(const ComparisonTable& table, bool normalized) {
    std::ostringstream out;
    const auto maxima = column_maxima(table);
    out << "demand point: " << fmt(table.demand_point, 1) << "%"
        << (normalized ? " (normalized to per-metric maximum)" : "") << "\n";
    out << "distribution  scheduler  ";
    for (const auto& col : kColumns) out << col.header << "  ";
    out << '\n';
    for (const auto& row : table.rows) {
        out << row.distribution << "  " << row.scheduler << "  ";
        for (std::size_t c = 0; c < kNumColumns; ++c) {
            double v = row.*(kColumns[c].field);
            if (normalized && maxima[c] > 0.0) v /= maxima[c];
            out << fmt(v, 4) << "  ";
        }
        out << '\n';
    }
    return out.str();
}

std::string comparison_csv(const ComparisonTable& table, bool normalized) {
    std::ostringstream out;
    const auto maxima = column_maxima(table);
    out << "distribution,scheduler,grid_pct";
    for (const auto& col : kColumns) out << ',' << col.header;
    out << '\n';
    for (const auto& row : table.rows) {
        out << row.distribution << ',' << row.scheduler << ',' << fmt(row.grid_pct, 2);
        for (std::size_t c = 0; c < kNumColumns; ++c) {
            double v = row.*(kColumns[c].field);
            if (normalized && maxima[c] > 0.0) v /= maxima[c];
            out << ',' << fmt(v);
        }
        out << '\n';
    }
    return out.str();
}

std::vector<std::filesystem::path> write_plot_data(
    const std::vector<std::filesystem::path>& result_files,
    const std::filesystem::path& out_dir) {
    require(!result_files.empty(), "no cells");
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    struct Series {
        std::string distribution, scheduler;
        std::vector<SnapshotAggregate> aggs;
        double mean_frag_severity;
    };
    std::vector<Series> series;
    for (const auto& file : result_files) {
        std::ifstream in(file);
        if (!in) throw std::invalid_argument("cannot open result file: " + file.string());
        nlohmann::json j;
        in >> j;
        Series s;
        s.distribution = j.at("distribution");
        s.scheduler = j.at("scheduler");
        s.mean_frag_severity = j.at("mean_frag_severity");
        for (const auto& aj : j.at("aggregate")) s.aggs.push_back(aggregate_from_json(aj));
        series.push_back(std::move(s));
    }

    struct Curve {
        const char* file;
        double SnapshotAggregate::*field;
    };
    constexpr Curve kCurves[] = {
        {"acceptance_vs_demand.csv", &SnapshotAggregate::acceptance_rate_mean},
        {"window_acceptance_vs_demand.csv", &SnapshotAggregate::window_acceptance_mean},
        {"scheduled_vs_demand.csv", &SnapshotAggregate::accepted_mean},
        {"utilization_vs_demand.csv", &SnapshotAggregate::utilization_mean},
        {"active_gpus_vs_demand.csv", &SnapshotAggregate::active_gpus_mean},
    };

    std::vector<fs::path> written;
    for (const auto& curve : kCurves) {
        fs::path p = out_dir / curve.file;
        std::ofstream out(p);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        out << "distribution,scheduler,demand_pct,value\n";
        for (const auto& s : series) {
            for (const auto& a : s.aggs) {
                out << s.distribution << ',' << s.scheduler << ',' << fmt(a.grid_pct, 2) << ','
                    << fmt(a.*(curve.field)) << '\n';
            }
        }
        written.push_back(p);
    }

    fs::path bars = out_dir / "frag_severity_bars.csv";
    std::ofstream out(bars);
    if (!out) throw std::runtime_error("cannot write " + bars.string());
    out << "distribution,scheduler,frag_severity\n";
    for (const auto& s : series)
        out << s.distribution << ',' << s.scheduler << ',' << fmt(s.mean_frag_severity) << '\n';
    written.push_back(bars);
    return written;
}

std::string inspect_report(const std::string& occupancy, const std::string& profile_name) {
    const OccupancyMask mask = parse_occupancy(occupancy);
    const int free = kSlicesPerGpu - std::popcount(static_cast<unsigned>(mask));
    std::ostringstream out;
    out << "occupancy: " << occupancy_to_string(mask) << '\n';
    out << "free slices: " << free << '\n';
    out << "fragmentation score: " << frag_score(mask) << '\n';

    auto breakdown = frag_breakdown(mask);
    if (breakdown.empty()) {
        out << (free == 0 ? "no profile passes the free-slice precheck\n"
                          : "no blocked (profile, index) pairs\n");
    } else {
        out << "contributions:\n";
        for (const auto& c : breakdown)
            out << "  " << c.profile->name << " @ " << c.start_index << "  +" << c.weight
                << '\n';
    }

    if (!profile_name.empty()) {
        const MigProfile& profile = profile_by_name(profile_name);
        out << profile.name << " fragmented: "
            << (is_fragmented(mask, profile) ? "yes" : "no") << '\n';
        if (profile.mem_slices > free) {
            out << "dry-run: profile does not fit (" << profile.mem_slices << " > " << free
                << " free)\n";
        } else {
            out << "dry-run score deltas:\n";
            const int before = frag_score(mask);
            int best_index = -1, best_delta = 0;
            for (int start : profile.feasible_indexes) {
                const OccupancyMask span = span_mask(start, profile.mem_slices);
                if (mask & span) {
                    out << "  index " << start << ": span occupied\n";
                    continue;
                }
                int delta = frag_score(static_cast<OccupancyMask>(mask | span)) - before;
                out << "  index " << start << ": " << (delta >= 0 ? "+" : "") << delta << '\n';
                if (best_index < 0 || delta < best_delta) {
                    best_index = start;
                    best_delta = delta;
                }
            }
            if (best_index >= 0)
                out << "recommended index: " << best_index << '\n';
            else
                out << "no free feasible index\n";
        }
    }
    return out.str();
}

} // namespace migsim
