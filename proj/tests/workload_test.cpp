#include <doctest.h>

#include <sstream>

#include "migsim/workload.hpp"

using namespace migsim;

TEST_CASE("builtin distributions are valid and match the published table") {
    for (const auto& name : builtin_distribution_names()) {
        const auto& d = builtin_distribution(name);
        CHECK_NOTHROW(d.validate());
    }
    // pmf order: 1g.10gb, 1g.20gb, 2g.20gb, 3g.40gb, 4g.40gb, 7g.80gb
    CHECK(builtin_distribution("skew-big").pmf[5] == doctest::Approx(0.30));
    CHECK(builtin_distribution("skew-small").pmf[0] == doctest::Approx(0.30));
    CHECK(builtin_distribution("bimodal").pmf[2] == doctest::Approx(0.05));
    CHECK_THROWS_AS(builtin_distribution("zipf"), std::out_of_range);

    ProfileDistribution bad{"bad", {0.5, 0.5, 0.5, 0, 0, 0}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("compute_horizon") {
    CHECK(compute_horizon(100, builtin_distribution("uniform")) == 229);
    CHECK(compute_horizon(100, builtin_distribution("skew-small")) == 334);

    ProfileDistribution only_full{"custom", {0, 0, 0, 0, 0, 1.0}};
    CHECK(compute_horizon(1, only_full) == 1);
}

TEST_CASE("sample_profile follows the pmf") {
    ProfileDistribution degenerate{"custom", {1.0, 0, 0, 0, 0, 0}};
    Rng rng(7);
    for (int i = 0; i < 100; ++i)
        CHECK(sample_profile(degenerate, rng).name == "1g.10gb");

    // empirical frequencies over 10^6 draws within +-0.005
    for (const auto& name : builtin_distribution_names()) {
        const auto& dist = builtin_distribution(name);
        Rng r(42);
        std::array<long, 6> counts{};
        const int n = 1'000'000;
        for (int i = 0; i < n; ++i)
            ++counts[profile_index(sample_profile(dist, r).name)];
        for (int k = 0; k < 6; ++k) {
            CAPTURE(name);
            CAPTURE(k);
            CHECK(std::abs(static_cast<double>(counts[k]) / n - dist.pmf[k]) < 0.005);
        }
    }
}

TEST_CASE("sample_duration is uniform on [1, T]") {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) CHECK(sample_duration(1, rng) == 1);

    const int T = 229;
    double sum = 0;
    const int n = 1'000'000;
    Rng r(5);
    for (int i = 0; i < n; ++i) {
        int d = sample_duration(T, r);
        CHECK(d >= 1);
        CHECK(d <= T);
        sum += d;
    }
    CHECK(std::abs(sum / n - (1.0 + T) / 2.0) < 0.5);
}

TEST_CASE("generate_trace") {
    TraceConfig cfg;
    cfg.cluster_size = 100;
    cfg.distribution = builtin_distribution("uniform");
    cfg.seed = 99;

    auto a = generate_trace(cfg);
    auto b = generate_trace(cfg);
    REQUIRE(a.size() == 229);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].workload_id == b[i].workload_id);
        CHECK(a[i].profile == b[i].profile);
        CHECK(a[i].arrival_slot == static_cast<int>(i));
        CHECK(a[i].duration_slots >= 1);
        CHECK(a[i].duration_slots <= 800); // default duration horizon: 8 * M
    }

    TraceConfig capped = cfg;
    capped.duration_horizon = 10;
    for (const auto& req : generate_trace(capped)) {
        CHECK(req.duration_slots >= 1);
        CHECK(req.duration_slots <= 10);
    }

    TraceConfig tiny;
    tiny.cluster_size = 2;
    tiny.distribution = ProfileDistribution{"custom", {0, 0, 0, 0, 0, 1.0}};
    tiny.seed = 1;
    auto t = generate_trace(tiny);
    REQUIRE(t.size() == 2);
    for (const auto& req : t) CHECK(req.profile->name == "7g.80gb");
}

TEST_CASE("trace round-trips through the line format") {
    TraceConfig cfg;
    cfg.cluster_size = 10;
    cfg.distribution = builtin_distribution("bimodal");
    cfg.seed = 4;
    auto trace = generate_trace(cfg);

    std::stringstream buf;
    write_trace(buf, trace);
    auto loaded = read_trace(buf);
    REQUIRE(loaded.size() == trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        CHECK(loaded[i].workload_id == trace[i].workload_id);
        CHECK(loaded[i].profile == trace[i].profile);
        CHECK(loaded[i].arrival_slot == trace[i].arrival_slot);
        CHECK(loaded[i].duration_slots == trace[i].duration_slots);
    }
}

TEST_CASE("derive_run_seed decorrelates nearby runs") {
    CHECK(derive_run_seed(0, 0) != derive_run_seed(0, 1));
    CHECK(derive_run_seed(0, 0) != derive_run_seed(1, 0));
    CHECK(derive_run_seed(5, 7) == derive_run_seed(5, 7));
}
