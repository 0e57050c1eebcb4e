#include "migsim/workload.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace migsim {

namespace {

// catalog order: 1g.10gb, 1g.20gb, 2g.20gb, 3g.40gb, 4g.40gb, 7g.80gb
const std::vector<ProfileDistribution> kBuiltins = {
    {"uniform", {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6}},
    {"skew-small", {0.30, 0.25, 0.20, 0.10, 0.10, 0.05}},
    {"skew-big", {0.05, 0.10, 0.10, 0.20, 0.25, 0.30}},
    {"bimodal", {0.30, 0.15, 0.05, 0.05, 0.15, 0.30}},
};

const std::vector<std::string> kBuiltinNames = {"uniform", "skew-small", "skew-big", "bimodal"};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

void ProfileDistribution::validate() const {
    double sum = 0.0;
    for (double p : pmf) {
        if (p < 0.0) throw std::invalid_argument("distribution has a negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("distribution probabilities must sum to 1");
}

const ProfileDistribution& builtin_distribution(const std::string& name) {
    for (const auto& d : kBuiltins) {
        if (d.name == name) return d;
    }
    throw std::out_of_range("unknown distribution: " + name);
}

const std::vector<std::string>& builtin_distribution_names() {
    return kBuiltinNames;
}

std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint64_t run_index) {
    return splitmix64(base_seed ^ splitmix64(run_index));
}

double expected_width(const ProfileDistribution& dist) {
    const auto& catalog = profile_catalog();
    double e = 0.0;
    for (std::size_t i = 0; i < catalog.size(); ++i) e += dist.pmf[i] * catalog[i].mem_slices;
    return e;
}

int compute_horizon(int cluster_size, const ProfileDistribution& dist) {
    dist.validate();
    double e = expected_width(dist);
    if (e <= 0.0) throw std::domain_error("distribution has zero expected width");
    return static_cast<int>(std::ceil(kSlicesPerGpu * cluster_size / e));
}

const MigProfile& sample_profile(const ProfileDistribution& dist, Rng& rng) {
    const auto& catalog = profile_catalog();
    double u = rng.next_unit();
    double cum = 0.0;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        cum += dist.pmf[i];
        if (u < cum) return catalog[i];
    }
    return catalog.back();
}

int sample_duration(int horizon, Rng& rng) {
    if (horizon < 1) throw std::domain_error("horizon must be >= 1");
    return rng.next_int(1, horizon);
}

std::vector<WorkloadRequest> generate_trace(const TraceConfig& config) {
    config.distribution.validate();
    const int horizon = config.horizon > 0
                            ? config.horizon
                            : compute_horizon(config.cluster_size, config.distribution);
    const int duration_horizon = config.duration_horizon > 0
                                     ? config.duration_horizon
                                     : kSlicesPerGpu * config.cluster_size;
    Rng rng(config.seed);
    std::vector<WorkloadRequest> trace;
    trace.reserve(horizon);
    for (int slot = 0; slot < horizon; ++slot) {
        const MigProfile& profile = sample_profile(config.distribution, rng);
        int duration = sample_duration(duration_horizon, rng);
        trace.push_back({static_cast<std::uint64_t>(slot), &profile, slot, duration});
    }
    return trace;
}

void write_trace(std::ostream& out, const std::vector<WorkloadRequest>& trace) {
    for (const auto& req : trace) {
        out << req.workload_id << ',' << req.profile->name << ',' << req.arrival_slot << ','
            << req.duration_slots << '\n';
    }
}

std::vector<WorkloadRequest> read_trace(std::istream& in) {
    std::vector<WorkloadRequest> trace;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string id_s, name, arrival_s, duration_s;
        if (!std::getline(ls, id_s, ',') || !std::getline(ls, name, ',') ||
            !std::getline(ls, arrival_s, ',') || !std::getline(ls, duration_s))
            throw std::invalid_argument("malformed trace line: " + line);
        trace.push_back({std::stoull(id_s), &profile_by_name(name), std::stoi(arrival_s),
                         std::stoi(duration_s)});
    }
    return trace;
}

} // namespace migsim
