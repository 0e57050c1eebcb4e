#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "migsim/mig_model.hpp"

namespace migsim {

// Probabilities aligned with profile_catalog() order.
struct ProfileDistribution {
    std::string name;
    std::array<double, 6> pmf{};

    // Throws std::invalid_argument on negative entries or sum != 1 (1e-9).
    void validate() const;
};

const ProfileDistribution& builtin_distribution(const std::string& name);
const std::vector<std::string>& builtin_distribution_names();

// Generator identity recorded in output manifests; traces are reproducible
// given the same generator.
inline constexpr const char* kRngId = "mt19937_64";

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer on [lo, hi] inclusive.
    int next_int(int lo, int hi) {
        int span = hi - lo + 1;
        int v = lo + static_cast<int>(next_unit() * span);
        return v > hi ? hi : v;
    }

  private:
    std::mt19937_64 engine_;
};

// splitmix64 mix of (base, run) so per-run streams are decorrelated.
std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint64_t run_index);

double expected_width(const ProfileDistribution& dist);

// Slots needed for cumulative expected demand (one arrival per slot) to reach
// cluster capacity: ceil(8*M / E[width]). Throws std::domain_error when the
// expected width is zero.
int compute_horizon(int cluster_size, const ProfileDistribution& dist);

// Inverse-CDF draw over the catalog in catalog order.
const MigProfile& sample_profile(const ProfileDistribution& dist, Rng& rng);

// Uniform integer on [1, horizon].
int sample_duration(int horizon, Rng& rng);

struct WorkloadRequest {
    std::uint64_t workload_id;
    const MigProfile* profile;
    int arrival_slot;
    int duration_slots;
};

struct TraceConfig {
    int cluster_size = 100;
    ProfileDistribution distribution;
    std::uint64_t seed = 0;
    int horizon = 0; // arrival slots; 0 = derive via compute_horizon
    // Upper bound of the duration draw. 0 = slots to saturate capacity at
    // one slice per slot, i.e. 8*M. Durations on that scale mostly outlive
    // the arrival window, so the cluster genuinely fills up instead of
    // settling into a half-empty steady state.
    int duration_horizon = 0;
};

// One request per slot 0..T-1, fully determined by (config, seed).
std::vector<WorkloadRequest> generate_trace(const TraceConfig& config);

// Line-delimited "workload_id,profile,arrival_slot,duration_slots".
void write_trace(std::ostream& out, const std::vector<WorkloadRequest>& trace);
std::vector<WorkloadRequest> read_trace(std::istream& in);

} // namespace migsim
