#include "migsim/fragmentation.hpp"

#include <bit>
#include <stdexcept>

namespace migsim {

namespace {

int free_count(OccupancyMask mask) {
    return kSlicesPerGpu - std::popcount(static_cast<unsigned>(mask));
}

int compute_score(OccupancyMask mask) {
    int score = 0;
    const int free = free_count(mask);
    for (const auto& p : profile_catalog()) {
        if (p.mem_slices > free) continue;
        for (int start : p.feasible_indexes) {
            if (mask & span_mask(start, p.mem_slices)) score += p.mem_slices;
        }
    }
    return score;
}

} // namespace

bool is_fragmented(OccupancyMask mask, const MigProfile& profile) {
    if (profile.mem_slices > free_count(mask)) return false;
    for (int start : profile.feasible_indexes) {
        if ((mask & span_mask(start, profile.mem_slices)) == 0) return false;
    }
    return true;
}

bool is_fragmented(const GpuState& gpu, const MigProfile& profile) {
    return is_fragmented(gpu.mask(), profile);
}

const std::array<int, 256>& frag_score_table() {
    static const std::array<int, 256> table = [] {
        std::array<int, 256> t{};
        for (int mask = 0; mask < 256; ++mask)
            t[mask] = compute_score(static_cast<OccupancyMask>(mask));
        return t;
    }();
    return table;
}

int frag_score(OccupancyMask mask) {
    return frag_score_table()[mask & 0xff];
}

int frag_score(const GpuState& gpu) {
    return frag_score(gpu.mask());
}

double cluster_severity(const ClusterState& cluster) {
    if (cluster.size() == 0) throw std::domain_error("cluster_severity: empty cluster");
    long total = 0;
    for (const auto& gpu : cluster.gpus()) total += frag_score(gpu.mask());
    return static_cast<double>(total) / cluster.size();
}

std::vector<FragContribution> frag_breakdown(OccupancyMask mask) {
    std::vector<FragContribution> out;
    const int free = free_count(mask);
    for (const auto& p : profile_catalog()) {
        if (p.mem_slices > free) continue;
        for (int start : p.feasible_indexes) {
            if (mask & span_mask(start, p.mem_slices))
                out.push_back({&p, start, p.mem_slices});
        }
    }
    return out;
}

} // namespace migsim
