#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace volgrid {

// 3D scalar grid in Hounsfield Units. Data is stored x-fastest
// (index = x + nx*(y + ny*z)), voxel values as 32-bit floats.
struct Volume {
    std::vector<float> data;
    std::array<int, 3> shape{0, 0, 0};          // (nx, ny, nz)
    std::array<double, 3> spacing{1.0, 1.0, 1.0};  // mm per voxel
    std::array<double, 3> origin{0.0, 0.0, 0.0};   // mm

    size_t voxel_count() const {
        return static_cast<size_t>(shape[0]) * shape[1] * shape[2];
    }
    size_t index(int x, int y, int z) const {
        return static_cast<size_t>(x) +
               static_cast<size_t>(shape[0]) * (static_cast<size_t>(y) +
               static_cast<size_t>(shape[1]) * static_cast<size_t>(z));
    }
    float& at(int x, int y, int z) { return data[index(x, y, z)]; }
    float at(int x, int y, int z) const { return data[index(x, y, z)]; }
};

Volume make_volume(std::array<int, 3> shape, std::array<double, 3> spacing,
                   float fill = 0.0f);

// Checks shape/spacing positivity, data length, and finiteness of all voxels.
void validate_volume(const Volume& vol);

// Affine intensity window: level-window/2 maps to out_lo, level+window/2 to
// out_hi, values outside clipped to the bounds.
struct WindowSpec {
    double level = 0.0;
    double window = 1.0;
    double out_lo = 0.0;
    double out_hi = 1.0;
};

void validate_window(const WindowSpec& spec);

Volume window_map(const Volume& vol, const WindowSpec& spec);

// Trilinear resample onto a uniform grid covering the same physical extent
// (voxel-center alignment, edge clamping). Output spacing = extent / shape.
Volume resample_linear(const Volume& vol, std::array<int, 3> target_shape);

// Nearest-neighbor variant; used for masks so labels stay binary.
Volume resample_nearest(const Volume& vol, std::array<int, 3> target_shape);

// Stacks the listed z-slices (duplicates and arbitrary order permitted) into
// a new volume with nz = indices.size().
Volume extract_slab(const Volume& vol, const std::vector<int>& slice_indices);

}  // namespace volgrid
