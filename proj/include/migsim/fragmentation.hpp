#pragma once

#include <array>
#include <vector>

#include "migsim/mig_model.hpp"

namespace migsim {

// A GPU is fragmented w.r.t. a profile when it has enough free slices for the
// profile yet no feasible start index with a fully free span.
bool is_fragmented(const GpuState& gpu, const MigProfile& profile);
bool is_fragmented(OccupancyMask mask, const MigProfile& profile);

// Fragmentation score F(m): for every profile passing the free-slice precheck,
// each feasible index whose span overlaps an occupied slice adds the profile's
// memory-slice width.
int frag_score(OccupancyMask mask);
int frag_score(const GpuState& gpu);

// Precomputed score for every occupancy mask. The hot paths (MFI dry-runs,
// per-slot severity) index into this.
const std::array<int, 256>& frag_score_table();

// Independent re-derivation of the score used only to cross-check frag_score.
// Shares no code with the implementation above.
int frag_score_oracle(const std::array<bool, 8>& occupancy);

// Mean fragmentation score over all GPUs. Throws std::domain_error on an
// empty cluster.
double cluster_severity(const ClusterState& cluster);

// Per-(profile, index) contributions, for inspection output.
struct FragContribution {
    const MigProfile* profile;
    int start_index;
    int weight;
};
std::vector<FragContribution> frag_breakdown(OccupancyMask mask);

} // namespace migsim
