#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace migsim {

// A100-80GB: every GPU exposes 8 memory slices at fixed positions 0..7.
inline constexpr int kSlicesPerGpu = 8;

// One row of the A100 MIG profile table: how many SM slices the profile
// consumes, how many contiguous memory slices its footprint spans, and the
// start indexes the hardware accepts.
struct MigProfile {
    std::string name;                  // "<g>g.<mem>gb"
    int compute_slices = 0;
    int mem_slices = 0;                // footprint width in memory slices
    std::vector<int> feasible_indexes; // ascending
};

// The six A100 profiles, ascending by (mem_slices, compute_slices).
const std::vector<MigProfile>& profile_catalog();

// Throws std::out_of_range for names not in the catalog.
const MigProfile& profile_by_name(const std::string& name);

// Position of a profile in the catalog, or -1 if unknown.
int profile_index(const std::string& name);

struct ConstraintError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConflictError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IdentityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bit i set <=> memory slice i is allocated.
using OccupancyMask = std::uint16_t;

inline OccupancyMask span_mask(int start, int width) {
    return static_cast<OccupancyMask>(((1u << width) - 1u) << start);
}

struct InstanceRecord {
    const MigProfile* profile = nullptr;
    int start_index = -1;
};

struct Placement {
    int gpu_id = -1;
    int start_index = -1;
    const MigProfile* profile = nullptr;
};

class GpuState {
  public:
    explicit GpuState(int gpu_id = 0) : gpu_id_(gpu_id) {}

    int gpu_id() const { return gpu_id_; }
    OccupancyMask mask() const { return mask_; }
    bool occupied(int index) const { return (mask_ >> index) & 1u; }
    int free_slices() const;

    // True iff positions start..start+width-1 are all unoccupied.
    // Throws std::out_of_range if the span does not fit on the GPU.
    bool span_free(int start, int width) const;

    // Throws ConstraintError (illegal index), ConflictError (occupied span)
    // or IdentityError (duplicate instance id).
    void allocate(const MigProfile& profile, int start_index, std::uint64_t instance_id);

    // Throws IdentityError if the instance is not hosted here.
    void release(std::uint64_t instance_id);

    const std::map<std::uint64_t, InstanceRecord>& instances() const { return instances_; }

    // 8 characters over {'.', '#'}, left-to-right by index.
    std::string occupancy_string() const;

  private:
    int gpu_id_;
    OccupancyMask mask_ = 0;
    std::map<std::uint64_t, InstanceRecord> instances_;
};

// Parses the 8-character {'.', '#'} encoding; throws std::invalid_argument.
OccupancyMask parse_occupancy(const std::string& text);
std::string occupancy_to_string(OccupancyMask mask);

class ClusterState {
  public:
    explicit ClusterState(int num_gpus);

    int size() const { return static_cast<int>(gpus_.size()); }
    GpuState& gpu(int id) { return gpus_.at(id); }
    const GpuState& gpu(int id) const { return gpus_.at(id); }
    const std::vector<GpuState>& gpus() const { return gpus_; }

  private:
    std::vector<GpuState> gpus_;
};

} // namespace migsim
