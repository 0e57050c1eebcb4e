#include "migsim/mig_model.hpp"

#include <bit>

namespace migsim {

const std::vector<MigProfile>& profile_catalog() {
    // 7g.80gb spans all 8 memory slices: 80 GB on an A100-80GB is the whole
    // memory, and the profile requires a full GPU.
    static const std::vector<MigProfile> catalog = {
        {"1g.10gb", 1, 1, {0, 1, 2, 3, 4, 5, 6}},
        {"1g.20gb", 1, 2, {0, 2, 4, 6}},
        {"2g.20gb", 2, 2, {0, 2, 4}},
        {"3g.40gb", 3, 4, {0, 4}},
        {"4g.40gb", 4, 4, {0}},
        {"7g.80gb", 7, 8, {0}},
    };
    return catalog;
}

const MigProfile& profile_by_name(const std::string& name) {
    for (const auto& p : profile_catalog()) {
        if (p.name == name) return p;
    }
    throw std::out_of_range("unknown MIG profile: " + name);
}

int profile_index(const std::string& name) {
    const auto& catalog = profile_catalog();
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        if (catalog[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

int GpuState::free_slices() const {
    return kSlicesPerGpu - std::popcount(static_cast<unsigned>(mask_));
}

bool GpuState::span_free(int start, int width) const {
    if (start < 0 || width < 0 || start + width > kSlicesPerGpu)
        throw std::out_of_range("slice span out of range");
    return (mask_ & span_mask(start, width)) == 0;
}

void GpuState::allocate(const MigProfile& profile, int start_index, std::uint64_t instance_id) {
    bool legal = false;
    for (int i : profile.feasible_indexes) {
        if (i == start_index) {
            legal = true;
            break;
        }
    }
    if (!legal)
        throw ConstraintError("index " + std::to_string(start_index) +
                              " is not feasible for profile " + profile.name);
    if (!span_free(start_index, profile.mem_slices))
        throw ConflictError("span at index " + std::to_string(start_index) +
                            " is already occupied on GPU " + std::to_string(gpu_id_));
    if (instances_.count(instance_id))
        throw IdentityError("instance id " + std::to_string(instance_id) +
                            " already hosted on GPU " + std::to_string(gpu_id_));
    mask_ |= span_mask(start_index, profile.mem_slices);
    instances_.emplace(instance_id, InstanceRecord{&profile, start_index});
}

void GpuState::release(std::uint64_t instance_id) {
    auto it = instances_.find(instance_id);
    if (it == instances_.end())
        throw IdentityError("instance id " + std::to_string(instance_id) +
                            " not hosted on GPU " + std::to_string(gpu_id_));
    mask_ &= static_cast<OccupancyMask>(
        ~span_mask(it->second.start_index, it->second.profile->mem_slices));
    instances_.erase(it);
}

std::string GpuState::occupancy_string() const {
    return occupancy_to_string(mask_);
}

OccupancyMask parse_occupancy(const std::string& text) {
    if (text.size() != kSlicesPerGpu)
        throw std::invalid_argument("occupancy string must be exactly 8 characters");
    OccupancyMask mask = 0;
    for (int i = 0; i < kSlicesPerGpu; ++i) {
        if (text[i] == '#')
            mask |= static_cast<OccupancyMask>(1u << i);
        else if (text[i] != '.')
            throw std::invalid_argument("occupancy string may contain only '.' and '#'");
    }
    return mask;
}

std::string occupancy_to_string(OccupancyMask mask) {
    std::string s(kSlicesPerGpu, '.');
    for (int i = 0; i < kSlicesPerGpu; ++i) {
        if ((mask >> i) & 1u) s[i] = '#';
    }
    return s;
}

ClusterState::ClusterState(int num_gpus) {
    gpus_.reserve(num_gpus);
    for (int id = 0; id < num_gpus; ++id) gpus_.emplace_back(id);
}

} // namespace migsim
