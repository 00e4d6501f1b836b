#pragma once

#include <array>

#include "common/rng.hpp"
#include "synthlab/skullstrip.hpp"
#include "volgrid/volume.hpp"

namespace synthlab {

// Lesion geometry and intensity: voxels whose center lies within radius_mm of
// the center voxel's center get independent N(mean_hu, sd_hu^2) draws.
struct SphereSpec {
    std::array<int, 3> center{0, 0, 0};  // voxel coordinates
    double radius_mm = 0.0;
    double mean_hu = 0.0;
    double sd_hu = 0.0;
};

// Rejection-samples a center uniformly over mask voxels until a sphere of
// radius_mm fits entirely inside the mask. Throws placement-infeasible with
// the attempt count when the cap is exhausted.
std::array<int, 3> sample_center(const BrainMask& mask, double radius_mm,
                                 common::Rng& rng, int max_attempts = 1000);

// True when every voxel within radius_mm of center (physical distance,
// anisotropic spacing respected) lies inside the mask and the volume bounds.
bool sphere_fits(const BrainMask& mask, const std::array<int, 3>& center,
                 double radius_mm);

// Replaces in-sphere voxels with noise draws; every other voxel is bitwise
// unchanged. Throws bounds error if the sphere exits the volume.
volgrid::Volume inject_sphere(const volgrid::Volume& vol, const SphereSpec& spec,
                              common::Rng& rng);

// Number of voxel centers within radius_mm of the center voxel's center.
size_t sphere_voxel_count(const volgrid::Volume& vol, const std::array<int, 3>& center,
                          double radius_mm);

}  // namespace synthlab
