#pragma once

#include <string>
#include <vector>

#include "migsim/mig_model.hpp"

namespace migsim {

struct ScheduleDecision {
    bool accepted = false;
    int gpu_id = -1;
    int start_index = -1;

    static ScheduleDecision accept(int gpu, int index) { return {true, gpu, index}; }
    static ScheduleDecision reject() { return {}; }

    bool operator==(const ScheduleDecision&) const = default;
};

enum class SchedulerKind { MFI, FF, RR, BF_BI, WF_BI };

// Names used in configs and on the CLI: mfi, ff, rr, bf-bi, wf-bi.
SchedulerKind scheduler_from_name(const std::string& name);
std::string scheduler_name(SchedulerKind kind);
const std::vector<std::string>& scheduler_names();

struct SchedulerOptions {
    // Default: each baseline commits to the GPU its slice-count criterion
    // picks and rejects when that GPU cannot host the profile. When false,
    // the scan falls through to the next GPU instead of rejecting.
    bool strict_first_choice = true;
};

// Index preference for the BI baselines: feasible indexes in descending
// order, so small profiles land high and leave index 0 for 4g.40gb.
std::vector<int> best_index_order(const MigProfile& profile);

// One dry-run candidate: fragmentation score delta of placing the profile at
// (gpu_id, start_index).
struct FragDelta {
    int gpu_id;
    int start_index;
    int delta;
};

// All feasible dry-run placements with their score deltas, in (gpu, index)
// scan order. Empty means reject.
std::vector<FragDelta> mfi_deltas(const ClusterState& cluster, const MigProfile& profile);

ScheduleDecision mfi_schedule(const ClusterState& cluster, const MigProfile& profile);
ScheduleDecision ff_schedule(const ClusterState& cluster, const MigProfile& profile,
                             const SchedulerOptions& opts = {});
ScheduleDecision rr_schedule(int& cursor, const ClusterState& cluster, const MigProfile& profile,
                             const SchedulerOptions& opts = {});
ScheduleDecision bfbi_schedule(const ClusterState& cluster, const MigProfile& profile,
                               const SchedulerOptions& opts = {});
ScheduleDecision wfbi_schedule(const ClusterState& cluster, const MigProfile& profile,
                               const SchedulerOptions& opts = {});

// Stateful dispatcher; only RR actually carries state (its cursor).
class Scheduler {
  public:
    Scheduler(SchedulerKind kind, SchedulerOptions opts = {}) : kind_(kind), opts_(opts) {}

    ScheduleDecision decide(const ClusterState& cluster, const MigProfile& profile);

    SchedulerKind kind() const { return kind_; }
    int cursor() const { return cursor_; }

  private:
    SchedulerKind kind_;
    SchedulerOptions opts_;
    int cursor_ = 0;
};

} // namespace migsim
