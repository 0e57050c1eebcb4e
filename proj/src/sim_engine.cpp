#include "migsim/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include "migsim/fragmentation.hpp"

namespace migsim {

std::vector<double> default_snapshot_grid() {
    std::vector<double> grid;
    for (int pct = 5; pct <= 100; pct += 5) grid.push_back(pct);
    return grid;
}

Simulation::Simulation(int cluster_size, SchedulerKind kind, SchedulerOptions opts)
    : cluster_(cluster_size), scheduler_(kind, opts) {}

int Simulation::active_gpus() const {
    int active = 0;
    for (const auto& gpu : cluster_.gpus()) {
        if (!gpu.instances().empty()) ++active;
    }
    return active;
}

void Simulation::advance_to(int slot) {
    for (int s = current_slot_ + 1; s <= slot; ++s) {
        auto due = terminations_.find(s);
        if (due == terminations_.end()) continue;
        for (std::uint64_t id : due->second) {
            int gpu_id = instance_gpu_.at(id);
            const auto& rec = cluster_.gpu(gpu_id).instances().at(id);
            occupied_slices_ -= rec.profile->mem_slices;
            cluster_.gpu(gpu_id).release(id);
            instance_gpu_.erase(id);
        }
        terminations_.erase(due);
    }
    current_slot_ = slot;
}

ScheduleDecision Simulation::step(const WorkloadRequest& request) {
    if (request.arrival_slot <= current_slot_)
        throw std::logic_error("requests must arrive in increasing slot order");
    advance_to(request.arrival_slot);
    ++arrived_;
    ScheduleDecision decision = scheduler_.decide(cluster_, *request.profile);
    if (decision.accepted) {
        cluster_.gpu(decision.gpu_id)
            .allocate(*request.profile, decision.start_index, request.workload_id);
        instance_gpu_[request.workload_id] = decision.gpu_id;
        terminations_[request.arrival_slot + request.duration_slots].push_back(
            request.workload_id);
        occupied_slices_ += request.profile->mem_slices;
        ++accepted_;
    }
    return decision;
}

RunResult simulate_trace(int cluster_size, SchedulerKind kind, SchedulerOptions opts,
                         const std::vector<WorkloadRequest>& trace,
                         const std::vector<double>& snapshot_grid) {
    Simulation sim(cluster_size, kind, opts);
    const double capacity = static_cast<double>(kSlicesPerGpu) * cluster_size;

    RunResult result;
    result.horizon = static_cast<int>(trace.size());

    long demand_slices = 0;
    double severity_sum = 0.0;
    std::size_t grid_idx = 0;
    long window_arrived = 0;
    long window_accepted = 0;

    auto take_snapshot = [&](int slot, double grid_pct, double demand_pct, double severity) {
        MetricsSnapshot snap;
        snap.slot = slot;
        snap.grid_pct = grid_pct;
        snap.demand_pct = demand_pct;
        snap.arrived = sim.arrived();
        snap.accepted = sim.accepted();
        snap.acceptance_rate =
            snap.arrived ? static_cast<double>(snap.accepted) / snap.arrived : 0.0;
        const long in_window = snap.arrived - window_arrived;
        snap.window_acceptance_rate =
            in_window ? static_cast<double>(snap.accepted - window_accepted) / in_window
                      : snap.acceptance_rate;
        window_arrived = snap.arrived;
        window_accepted = snap.accepted;
        snap.utilization_pct = 100.0 * sim.occupied_slices() / capacity;
        snap.active_gpus_pct = 100.0 * sim.active_gpus() / cluster_size;
        snap.frag_severity = severity;
        result.snapshots.push_back(snap);
    };

    for (const auto& request : trace) {
        sim.step(request);
        demand_slices += request.profile->mem_slices;
        const double demand_pct = 100.0 * demand_slices / capacity;
        const double severity = cluster_severity(sim.cluster());
        severity_sum += severity;
        while (grid_idx < snapshot_grid.size() &&
               demand_pct >= snapshot_grid[grid_idx] - 1e-9) {
            take_snapshot(request.arrival_slot, snapshot_grid[grid_idx], demand_pct, severity);
            ++grid_idx;
        }
    }

    // final sample at slot T-1 when the trace did not reach the last grid point
    if (!trace.empty() && grid_idx < snapshot_grid.size()) {
        const double demand_pct = 100.0 * demand_slices / capacity;
        take_snapshot(trace.back().arrival_slot, snapshot_grid.back(), demand_pct,
                      cluster_severity(sim.cluster()));
    }

    result.avg_frag_severity = trace.empty() ? 0.0 : severity_sum / trace.size();
    result.total_arrived = sim.arrived();
    result.total_accepted = sim.accepted();
    return result;
}

RunResult run_single(const SimConfig& config, std::uint64_t run_index) {
    TraceConfig tc;
    tc.cluster_size = config.cluster_size;
    tc.distribution = config.distribution;
    tc.seed = derive_run_seed(config.seed, run_index);
    auto trace = generate_trace(tc);
    RunResult result = simulate_trace(config.cluster_size, config.scheduler, config.policy,
                                      trace, config.snapshot_grid);
    result.run_index = run_index;
    result.seed = tc.seed;
    return result;
}

namespace {

struct Welford {
    long n = 0;
    double mean = 0.0, m2 = 0.0;
    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    double stddev() const { return n > 1 ? std::sqrt(m2 / (n - 1)) : 0.0; }
};

} // namespace

BatchResult run_batch(const SimConfig& config) {
    if (config.runs < 1) throw std::invalid_argument("runs must be >= 1");
    config.distribution.validate();

    BatchResult batch;
    batch.config = config;
    batch.runs.resize(config.runs);

    int workers = config.parallelism > 0
                      ? config.parallelism
                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, config.runs);

    if (workers <= 1) {
        for (int r = 0; r < config.runs; ++r) batch.runs[r] = run_single(config, r);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int r = w; r < config.runs; r += workers)
                    batch.runs[r] = run_single(config, r);
            });
        }
        for (auto& t : pool) t.join();
    }

    // deterministic fold in run-index order, keyed by grid point
    std::map<double, std::array<Welford, 6>> acc;
    Welford severity;
    for (const auto& run : batch.runs) {
        severity.add(run.avg_frag_severity);
        for (const auto& snap : run.snapshots) {
            auto& ws = acc[snap.grid_pct];
            ws[0].add(snap.acceptance_rate);
            ws[1].add(static_cast<double>(snap.accepted));
            ws[2].add(snap.utilization_pct);
            ws[3].add(snap.active_gpus_pct);
            ws[4].add(snap.frag_severity);
            ws[5].add(snap.window_acceptance_rate);
        }
    }
    batch.mean_frag_severity = severity.mean;
    for (const auto& [grid_pct, ws] : acc) {
        SnapshotAggregate agg;
        agg.grid_pct = grid_pct;
        agg.runs = static_cast<int>(ws[0].n);
        agg.acceptance_rate_mean = ws[0].mean;
        agg.acceptance_rate_std = ws[0].stddev();
        agg.accepted_mean = ws[1].mean;
        agg.accepted_std = ws[1].stddev();
        agg.utilization_mean = ws[2].mean;
        agg.utilization_std = ws[2].stddev();
        agg.active_gpus_mean = ws[3].mean;
        agg.active_gpus_std = ws[3].stddev();
        agg.frag_severity_mean = ws[4].mean;
        agg.frag_severity_std = ws[4].stddev();
        agg.window_acceptance_mean = ws[5].mean;
        agg.window_acceptance_std = ws[5].stddev();
        batch.aggregate.push_back(agg);
    }
    return batch;
}

} // namespace migsim
