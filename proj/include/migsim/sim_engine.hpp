#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "migsim/schedulers.hpp"
#include "migsim/workload.hpp"

namespace migsim {

// Demand percentages at which per-run metrics are sampled: 5..100 step 5
// (includes the 85% heavy-load operating point).
std::vector<double> default_snapshot_grid();

struct SimConfig {
    int cluster_size = 100;
    ProfileDistribution distribution;
    SchedulerKind scheduler = SchedulerKind::MFI;
    int runs = 1;
    std::uint64_t seed = 0;
    std::vector<double> snapshot_grid = default_snapshot_grid();
    SchedulerOptions policy;
    int parallelism = 0; // 0 = hardware concurrency
};

struct MetricsSnapshot {
    int slot = 0;
    double grid_pct = 0.0;   // grid point that triggered the sample
    double demand_pct = 0.0; // actual cumulative requested slices, % of 8M
    long arrived = 0;
    long accepted = 0;
    double acceptance_rate = 0.0; // cumulative since the start of the run
    // Acceptance among arrivals since the previous grid sample: the
    // operating-point view of acceptance under the instantaneous load.
    // Equals acceptance_rate when the window holds no arrivals.
    double window_acceptance_rate = 0.0;
    double utilization_pct = 0.0;
    double active_gpus_pct = 0.0;
    double frag_severity = 0.0;
};

struct RunResult {
    std::uint64_t run_index = 0;
    std::uint64_t seed = 0;
    int horizon = 0;
    std::vector<MetricsSnapshot> snapshots;
    double avg_frag_severity = 0.0; // mean over all slot ends
    long total_arrived = 0;
    long total_accepted = 0;
};

// One simulated cluster: terminations due at a slot are released before that
// slot's arrival is scheduled; accepted placements are committed; rejected
// workloads are never retried.
class Simulation {
  public:
    Simulation(int cluster_size, SchedulerKind kind, SchedulerOptions opts = {});

    ScheduleDecision step(const WorkloadRequest& request);

    const ClusterState& cluster() const { return cluster_; }
    long arrived() const { return arrived_; }
    long accepted() const { return accepted_; }
    int occupied_slices() const { return occupied_slices_; }
    int active_gpus() const;

  private:
    void advance_to(int slot);

    ClusterState cluster_;
    Scheduler scheduler_;
    std::unordered_map<int, std::vector<std::uint64_t>> terminations_; // slot -> ids
    std::unordered_map<std::uint64_t, int> instance_gpu_;
    long arrived_ = 0;
    long accepted_ = 0;
    int occupied_slices_ = 0;
    int current_slot_ = -1;
};

// Replays an explicit trace; used both by run_single and for comparing
// schedulers on identical request sequences.
RunResult simulate_trace(int cluster_size, SchedulerKind kind, SchedulerOptions opts,
                         const std::vector<WorkloadRequest>& trace,
                         const std::vector<double>& snapshot_grid);

RunResult run_single(const SimConfig& config, std::uint64_t run_index);

struct SnapshotAggregate {
    double grid_pct = 0.0;
    int runs = 0; // runs contributing to this grid point
    double acceptance_rate_mean = 0.0, acceptance_rate_std = 0.0;
    double window_acceptance_mean = 0.0, window_acceptance_std = 0.0;
    double accepted_mean = 0.0, accepted_std = 0.0;
    double utilization_mean = 0.0, utilization_std = 0.0;
    double active_gpus_mean = 0.0, active_gpus_std = 0.0;
    double frag_severity_mean = 0.0, frag_severity_std = 0.0;
};

struct BatchResult {
    SimConfig config;
    std::vector<RunResult> runs; // ordered by run index
    std::vector<SnapshotAggregate> aggregate;
    double mean_frag_severity = 0.0; // mean over runs of avg_frag_severity
};

// Independent seeded runs, optionally in parallel; the aggregate is a
// deterministic fold in run-index order.
BatchResult run_batch(const SimConfig& config);

} // namespace migsim
