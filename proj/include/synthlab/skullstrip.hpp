#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "volgrid/volume.hpp"

namespace synthlab {

// Binary grid aligned to a Volume (same shape/spacing).
struct BrainMask {
    std::vector<uint8_t> data;
    std::array<int, 3> shape{0, 0, 0};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};

    size_t voxel_count() const {
        return static_cast<size_t>(shape[0]) * shape[1] * shape[2];
    }
    size_t index(int x, int y, int z) const {
        return static_cast<size_t>(x) +
               static_cast<size_t>(shape[0]) * (static_cast<size_t>(y) +
               static_cast<size_t>(shape[1]) * static_cast<size_t>(z));
    }
    uint8_t& at(int x, int y, int z) { return data[index(x, y, z)]; }
    uint8_t at(int x, int y, int z) const { return data[index(x, y, z)]; }
    size_t count() const;
};

struct SkullStripParams {
    double bone_hu = 300.0;      // voxels above this never enter the mask
    double tissue_lo_hu = -20.0;  // soft-tissue band
    double tissue_hi_hu = 100.0;
};

// Brain parenchyma mask: soft-tissue band restricted to the space enclosed by
// the skull, largest 6-connected component, holes filled per slice.
// Throws empty-mask (validation) error when no brain-range tissue exists.
BrainMask strip_skull(const volgrid::Volume& vol, const SkullStripParams& params = {});

// Masks travel as NIfTI with uint8 payload.
volgrid::Volume mask_to_volume(const BrainMask& mask);
BrainMask mask_from_volume(const volgrid::Volume& vol, float threshold = 0.5f);

double dice_overlap(const BrainMask& a, const BrainMask& b);

}  // namespace synthlab
