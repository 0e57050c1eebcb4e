#pragma once

// Shared helpers for randomized tests: clusters reached through valid
// allocate/release sequences only.

#include "migsim/mig_model.hpp"
#include "migsim/workload.hpp"

namespace migsim {

inline ClusterState random_cluster(int num_gpus, Rng& rng) {
    ClusterState cluster(num_gpus);
    std::uint64_t next_id = 1;
    int attempts = rng.next_int(0, num_gpus * 8);
    for (int a = 0; a < attempts; ++a) {
        GpuState& gpu = cluster.gpu(rng.next_int(0, num_gpus - 1));
        const auto& catalog = profile_catalog();
        const MigProfile& p = catalog[rng.next_int(0, 5)];
        int start = p.feasible_indexes[rng.next_int(
            0, static_cast<int>(p.feasible_indexes.size()) - 1)];
        if (gpu.span_free(start, p.mem_slices)) gpu.allocate(p, start, next_id++);
        // occasional release so non-packed shapes appear
        if (rng.next_unit() < 0.3 && !gpu.instances().empty()) {
            auto it = gpu.instances().begin();
            std::advance(it, rng.next_int(0, static_cast<int>(gpu.instances().size()) - 1));
            gpu.release(it->first);
        }
    }
    return cluster;
}

} // namespace migsim
