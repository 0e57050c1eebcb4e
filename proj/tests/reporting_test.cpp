#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "migsim/reporting.hpp"

using namespace migsim;
namespace fs = std::filesystem;

namespace {

ExperimentSpec small_spec(const std::string& out_dir) {
    ExperimentSpec spec;
    spec.cluster_size = 10;
    spec.runs = 4;
    spec.seed = 321;
    spec.distributions = {"uniform", "skew-big"};
    spec.schedulers = {"mfi", "rr"};
    spec.out_dir = out_dir;
    return spec;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("spec parsing and validation") {
    nlohmann::json j = {
        {"cluster_size", 50},
        {"runs", 7},
        {"seed", 9},
        {"distributions", {"uniform"}},
        {"schedulers", {"mfi", "bf-bi"}},
    };
    auto spec = parse_spec(j);
    CHECK(spec.cluster_size == 50);
    CHECK(spec.runs == 7);
    CHECK(spec.schedulers == std::vector<std::string>{"mfi", "bf-bi"});
    CHECK(spec.snapshot_grid == default_snapshot_grid());

    CHECK_THROWS_AS(parse_spec({{"runs", 0}}), std::invalid_argument);
    CHECK_THROWS_AS(parse_spec({{"schedulers", {"foo"}}}), std::invalid_argument);
    CHECK_THROWS_AS(parse_spec({{"distributions", {"zipf"}}}), std::out_of_range);
    CHECK_THROWS_AS(parse_spec({{"snapshot_grid", {50.0, 120.0}}}), std::invalid_argument);

    // round-trip through json keeps the spec
    auto spec2 = parse_spec(spec_to_json(spec));
    CHECK(spec2.cluster_size == spec.cluster_size);
    CHECK(spec2.seed == spec.seed);
    CHECK(spec2.distributions == spec.distributions);
}

TEST_CASE("experiment produces one cell per (distribution, scheduler)") {
    TempDir dir("migsim_reporting_cells");
    auto spec = small_spec(dir.path.string());
    auto cells = run_experiment(spec);
    REQUIRE(cells.size() == 4);
    CHECK(cells[0].distribution == "uniform");
    CHECK(cells[0].scheduler == "mfi");
    CHECK(cells[3].distribution == "skew-big");
    CHECK(cells[3].scheduler == "rr");

    auto files = write_results(spec, cells);
    // 4 cells x (csv + json) + manifest
    CHECK(files.size() == 9);
    for (const auto& f : files) CHECK(fs::exists(f));

    std::ifstream in(dir.path / "manifest.json");
    nlohmann::json manifest;
    in >> manifest;
    CHECK(manifest.at("rng") == kRngId);
    CHECK(manifest.at("version") == kVersion);
    CHECK(manifest.at("cells").size() == 4);
    CHECK(manifest.at("spec").at("seed") == 321);
}

TEST_CASE("same spec and seed give byte-identical CSV bodies") {
    TempDir dir("migsim_reporting_determinism");
    auto spec = small_spec(dir.path.string());
    spec.distributions = {"uniform"};
    spec.schedulers = {"mfi"};
    spec.parallelism = 2;

    auto a = run_experiment(spec);
    auto b = run_experiment(spec);
    REQUIRE(a.size() == 1);
    CHECK(cell_csv(a[0]) == cell_csv(b[0]));
    CHECK(cell_json(a[0]) == cell_json(b[0]));
}

TEST_CASE("compare round-trips exported aggregates exactly") {
    TempDir dir("migsim_reporting_roundtrip");
    auto spec = small_spec(dir.path.string());
    auto cells = run_experiment(spec);
    write_results(spec, cells);

    std::vector<fs::path> json_files;
    for (const auto& entry : fs::directory_iterator(dir.path)) {
        if (entry.path().extension() == ".json" && entry.path().filename() != "manifest.json")
            json_files.push_back(entry.path());
    }
    std::sort(json_files.begin(), json_files.end());
    REQUIRE(json_files.size() == 4);

    auto from_files = compare_results(json_files, 85.0);
    auto in_memory = build_comparison(cells, 85.0);
    REQUIRE(from_files.rows.size() == in_memory.rows.size());

    auto find_row = [](const ComparisonTable& t, const std::string& d, const std::string& s) {
        for (const auto& r : t.rows) {
            if (r.distribution == d && r.scheduler == s) return r;
        }
        throw std::logic_error("row not found");
    };
    for (const auto& row : in_memory.rows) {
        auto loaded = find_row(from_files, row.distribution, row.scheduler);
        CHECK(loaded.acceptance_rate == row.acceptance_rate);
        CHECK(loaded.window_acceptance_rate == row.window_acceptance_rate);
        CHECK(loaded.accepted == row.accepted);
        CHECK(loaded.utilization_pct == row.utilization_pct);
        CHECK(loaded.active_gpus_pct == row.active_gpus_pct);
        CHECK(loaded.frag_severity == row.frag_severity);
    }
}

TEST_CASE("normalization puts the per-metric maximum at 1.0") {
    TempDir dir("migsim_reporting_norm");
    auto spec = small_spec(dir.path.string());
    auto cells = run_experiment(spec);
    auto table = build_comparison(cells, 85.0);

    auto csv = comparison_csv(table, /*normalized=*/true);
    // parse values back and check each metric column peaks at 1.0
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line); // header
    std::vector<std::array<double, 6>> rows;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string field;
        std::array<double, 6> vals{};
        for (int c = 0; std::getline(ls, field, ','); ++c) {
            if (c >= 3) vals[c - 3] = std::stod(field);
        }
        rows.push_back(vals);
    }
    REQUIRE(rows.size() == 4);
    for (int c = 0; c < 6; ++c) {
        double maxv = 0;
        for (const auto& r : rows) {
            CHECK(r[c] <= 1.0 + 1e-12);
            maxv = std::max(maxv, r[c]);
        }
        CHECK(maxv == doctest::Approx(1.0));
    }

    // single-cell table normalizes to all ones
    auto one = build_comparison({cells[0]}, 85.0);
    auto one_csv = comparison_csv(one, true);
    CHECK(one_csv.find("1.000000,1.000000,1.000000,1.000000,1.000000,1.000000") !=
          std::string::npos);
}

TEST_CASE("plot data emits six files with all series") {
    TempDir dir("migsim_reporting_plots");
    auto spec = small_spec(dir.path.string());
    auto cells = run_experiment(spec);
    write_results(spec, cells);

    std::vector<fs::path> json_files;
    for (const auto& entry : fs::directory_iterator(dir.path)) {
        if (entry.path().extension() == ".json" && entry.path().filename() != "manifest.json")
            json_files.push_back(entry.path());
    }
    auto written = write_plot_data(json_files, dir.path / "plots");
    REQUIRE(written.size() == 6);

    std::ifstream bars(dir.path / "plots" / "frag_severity_bars.csv");
    std::string line;
    int data_lines = 0;
    std::getline(bars, line);
    CHECK(line == "distribution,scheduler,frag_severity");
    while (std::getline(bars, line)) ++data_lines;
    CHECK(data_lines == 4);

    CHECK_THROWS_AS(write_plot_data({}, dir.path / "plots"), std::invalid_argument);
}

TEST_CASE("inspect report") {
    auto report = inspect_report(".#......", "");
    CHECK(report.find("fragmentation score: 13") != std::string::npos);
    CHECK(report.find("1g.10gb @ 1  +1") != std::string::npos);
    CHECK(report.find("4g.40gb @ 0  +4") != std::string::npos);
    // width 8 fails the precheck on any non-empty GPU
    CHECK(report.find("7g.80gb") == std::string::npos);

    auto full = inspect_report("########", "");
    CHECK(full.find("fragmentation score: 0") != std::string::npos);
    CHECK(full.find("no profile passes the free-slice precheck") != std::string::npos);

    auto with_profile = inspect_report("........", "1g.10gb");
    CHECK(with_profile.find("index 6: +7") != std::string::npos);
    CHECK(with_profile.find("index 1: +13") != std::string::npos);
    CHECK(with_profile.find("recommended index: 6") != std::string::npos);

    CHECK_THROWS_AS(inspect_report("bogus", ""), std::invalid_argument);
}
