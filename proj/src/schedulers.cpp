#include "migsim/schedulers.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>

#include "migsim/fragmentation.hpp"

namespace migsim {

namespace {

const std::vector<std::string> kSchedulerNames = {"mfi", "ff", "rr", "bf-bi", "wf-bi"};

// First free legal index in the given preference order, or -1.
int first_free_index(const GpuState& gpu, const MigProfile& profile,
                     const std::vector<int>& order) {
    for (int start : order) {
        if (gpu.span_free(start, profile.mem_slices)) return start;
    }
    return -1;
}

struct FirstFitOutcome {
    ScheduleDecision decision;
    int chosen_gpu = -1; // GPU the criterion settled on, even when it failed
};

// Shared scan for FF/RR: GPUs visited in the order produced by next(); the
// first GPU with enough free slices is the criterion's choice.
template <typename NextGpu>
FirstFitOutcome first_fit_scan(const ClusterState& cluster, const MigProfile& profile,
                               const SchedulerOptions& opts, NextGpu next) {
    for (int visited = 0; visited < cluster.size(); ++visited) {
        const GpuState& gpu = cluster.gpu(next(visited));
        if (gpu.free_slices() < profile.mem_slices) continue;
        int start = first_free_index(gpu, profile, profile.feasible_indexes);
        if (start >= 0)
            return {ScheduleDecision::accept(gpu.gpu_id(), start), gpu.gpu_id()};
        if (opts.strict_first_choice) return {ScheduleDecision::reject(), gpu.gpu_id()};
    }
    return {ScheduleDecision::reject(), -1};
}

// Shared scan for BF-BI/WF-BI: pick the GPU optimizing post-allocation free
// slices, lowest gpu_id on ties, index by descending legal preference.
ScheduleDecision fit_by_index_scan(const ClusterState& cluster, const MigProfile& profile,
                                   const SchedulerOptions& opts, bool minimize) {
    const std::vector<int> order = best_index_order(profile);
    int best_gpu = -1;
    int best_start = -1;
    int best_free = 0;
    for (const GpuState& gpu : cluster.gpus()) {
        int free = gpu.free_slices();
        if (free < profile.mem_slices) continue;
        if (best_gpu >= 0 && (minimize ? free >= best_free : free <= best_free)) continue;
        if (opts.strict_first_choice) {
            // the criterion sees only slice counts; its pick may fail
            best_gpu = gpu.gpu_id();
            best_free = free;
            best_start = first_free_index(gpu, profile, order);
        } else {
            int start = first_free_index(gpu, profile, order);
            if (start < 0) continue;
            best_gpu = gpu.gpu_id();
            best_free = free;
            best_start = start;
        }
    }
    if (best_gpu < 0 || best_start < 0) return ScheduleDecision::reject();
    return ScheduleDecision::accept(best_gpu, best_start);
}

} // namespace

SchedulerKind scheduler_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kSchedulerNames.size(); ++i) {
        if (kSchedulerNames[i] == name) return static_cast<SchedulerKind>(i);
    }
    throw std::invalid_argument("unknown scheduler: " + name);
}

std::string scheduler_name(SchedulerKind kind) {
    return kSchedulerNames.at(static_cast<std::size_t>(kind));
}

const std::vector<std::string>& scheduler_names() {
    return kSchedulerNames;
}

std::vector<int> best_index_order(const MigProfile& profile) {
    std::vector<int> order(profile.feasible_indexes.rbegin(), profile.feasible_indexes.rend());
    return order;
}

std::vector<FragDelta> mfi_deltas(const ClusterState& cluster, const MigProfile& profile) {
    std::vector<FragDelta> deltas;
    for (const GpuState& gpu : cluster.gpus()) {
        if (gpu.free_slices() < profile.mem_slices) continue;
        const OccupancyMask mask = gpu.mask();
        const int before = frag_score(mask);
        for (int start : profile.feasible_indexes) {
            const OccupancyMask span = span_mask(start, profile.mem_slices);
            if (mask & span) continue; // dry-runs only on free spans
            int after = frag_score(static_cast<OccupancyMask>(mask | span));
            deltas.push_back({gpu.gpu_id(), start, after - before});
        }
    }
    return deltas;
}

namespace {

// Per-GPU optimum of the dry-run search for one profile on one occupancy:
// minimum score delta over the free legal spans, lowest start index on ties.
struct BestPlacement {
    std::int16_t delta = 0;
    std::int8_t start = -1; // -1: no free legal span on this occupancy
};

// For the catalog profiles the per-GPU optimum depends only on the 8-bit
// occupancy, so it is tabulated once; the cluster scan then costs one table
// lookup per GPU, keeping decisions linear in the cluster size.
const std::array<std::array<BestPlacement, 256>, 6>& best_placement_table() {
    static const auto table = [] {
        std::array<std::array<BestPlacement, 256>, 6> t{};
        const auto& catalog = profile_catalog();
        for (std::size_t p = 0; p < catalog.size(); ++p) {
            for (int mask = 0; mask < 256; ++mask) {
                BestPlacement best;
                const int before = frag_score(static_cast<OccupancyMask>(mask));
                for (int start : catalog[p].feasible_indexes) {
                    const OccupancyMask span = span_mask(start, catalog[p].mem_slices);
                    if (mask & span) continue;
                    int delta =
                        frag_score(static_cast<OccupancyMask>(mask | span)) - before;
                    if (best.start < 0 || delta < best.delta) {
                        best.delta = static_cast<std::int16_t>(delta);
                        best.start = static_cast<std::int8_t>(start);
                    }
                }
                t[p][mask] = best;
            }
        }
        return t;
    }();
    return table;
}

int catalog_index_of(const MigProfile& profile) {
    const auto& catalog = profile_catalog();
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        if (&catalog[i] == &profile) return static_cast<int>(i);
    }
    return -1;
}

} // namespace

ScheduleDecision mfi_schedule(const ClusterState& cluster, const MigProfile& profile) {
    ScheduleDecision best = ScheduleDecision::reject();
    int best_delta = 0;
    // scan order is (ascending gpu_id, ascending index), so strict
    // improvement implements the tie-break
    if (int cat = catalog_index_of(profile); cat >= 0) {
        const auto& by_mask = best_placement_table()[cat];
        for (const GpuState& gpu : cluster.gpus()) {
            const BestPlacement& cand = by_mask[gpu.mask()];
            if (cand.start < 0) continue;
            if (!best.accepted || cand.delta < best_delta) {
                best = ScheduleDecision::accept(gpu.gpu_id(), cand.start);
                best_delta = cand.delta;
            }
        }
        return best;
    }
    for (const GpuState& gpu : cluster.gpus()) {
        if (gpu.free_slices() < profile.mem_slices) continue;
        const OccupancyMask mask = gpu.mask();
        const int before = frag_score(mask);
        for (int start : profile.feasible_indexes) {
            const OccupancyMask span = span_mask(start, profile.mem_slices);
            if (mask & span) continue;
            int delta = frag_score(static_cast<OccupancyMask>(mask | span)) - before;
            if (!best.accepted || delta < best_delta) {
                best = ScheduleDecision::accept(gpu.gpu_id(), start);
                best_delta = delta;
            }
        }
    }
    return best;
}

ScheduleDecision ff_schedule(const ClusterState& cluster, const MigProfile& profile,
                             const SchedulerOptions& opts) {
    return first_fit_scan(cluster, profile, opts, [](int visited) { return visited; }).decision;
}

ScheduleDecision rr_schedule(int& cursor, const ClusterState& cluster, const MigProfile& profile,
                             const SchedulerOptions& opts) {
    if (cursor < 0 || cursor >= cluster.size())
        throw std::out_of_range("RR cursor out of range");
    const int m = cluster.size();
    const int origin = cursor;
    auto outcome = first_fit_scan(cluster, profile, opts,
                                  [origin, m](int visited) { return (origin + visited) % m; });
    // the rotation moves past every GPU the criterion settled on, whether or
    // not the allocation on it succeeded
    if (outcome.chosen_gpu >= 0) cursor = (outcome.chosen_gpu + 1) % m;
    return outcome.decision;
}

ScheduleDecision bfbi_schedule(const ClusterState& cluster, const MigProfile& profile,
                               const SchedulerOptions& opts) {
    return fit_by_index_scan(cluster, profile, opts, /*minimize=*/true);
}

ScheduleDecision wfbi_schedule(const ClusterState& cluster, const MigProfile& profile,
                               const SchedulerOptions& opts) {
    return fit_by_index_scan(cluster, profile, opts, /*minimize=*/false);
}

ScheduleDecision Scheduler::decide(const ClusterState& cluster, const MigProfile& profile) {
    switch (kind_) {
        case SchedulerKind::MFI: return mfi_schedule(cluster, profile);
        case SchedulerKind::FF: return ff_schedule(cluster, profile, opts_);
        case SchedulerKind::RR: {
            if (cursor_ >= cluster.size()) cursor_ = 0;
            return rr_schedule(cursor_, cluster, profile, opts_);
        }
        case SchedulerKind::BF_BI: return bfbi_schedule(cluster, profile, opts_);
        case SchedulerKind::WF_BI: return wfbi_schedule(cluster, profile, opts_);
    }
    throw std::logic_error("unreachable scheduler kind");
}

} // namespace migsim
