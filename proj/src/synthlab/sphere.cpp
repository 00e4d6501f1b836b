#include "synthlab/sphere.hpp"

#include <cmath>

#include "common/error.hpp"

namespace synthlab {

namespace {

struct SphereExtent {
    int lo[3], hi[3];  // inclusive voxel bounding box, unclamped
};

SphereExtent bounding_box(const std::array<int, 3>& center, double radius_mm,
                          const std::array<double, 3>& spacing) {
    SphereExtent e;
    for (int a = 0; a < 3; ++a) {
        const int r = static_cast<int>(std::floor(radius_mm / spacing[a]));
        e.lo[a] = center[a] - r;
        e.hi[a] = center[a] + r;
    }
    return e;
}

}  // namespace

bool sphere_fits(const BrainMask& mask, const std::array<int, 3>& center,
                 double radius_mm) {
    const auto e = bounding_box(center, radius_mm, mask.spacing);
    for (int a = 0; a < 3; ++a)
        if (e.lo[a] < 0 || e.hi[a] >= mask.shape[a]) return false;
    const double r2 = radius_mm * radius_mm;
    for (int z = e.lo[2]; z <= e.hi[2]; ++z)
        for (int y = e.lo[1]; y <= e.hi[1]; ++y)
            for (int x = e.lo[0]; x <= e.hi[0]; ++x) {
                const double dx = (x - center[0]) * mask.spacing[0];
                const double dy = (y - center[1]) * mask.spacing[1];
                const double dz = (z - center[2]) * mask.spacing[2];
                if (dx * dx + dy * dy + dz * dz <= r2 && !mask.at(x, y, z))
                    return false;
            }
    return true;
}

std::array<int, 3> sample_center(const BrainMask& mask, double radius_mm,
                                 common::Rng& rng, int max_attempts) {
    std::vector<std::array<int, 3>> candidates;
    for (int z = 0; z < mask.shape[2]; ++z)
        for (int y = 0; y < mask.shape[1]; ++y)
            for (int x = 0; x < mask.shape[0]; ++x)
                if (mask.at(x, y, z)) candidates.push_back({x, y, z});
    if (candidates.empty())
        throw common::validation_error("sample_center: empty mask");

    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        const auto& c = candidates[rng.next_below(candidates.size())];
        if (sphere_fits(mask, c, radius_mm)) return c;
    }
    throw common::placement_infeasible_error(
        "no feasible sphere placement after " + std::to_string(max_attempts) +
        " attempts (radius " + std::to_string(radius_mm) + " mm)");
}

volgrid::Volume inject_sphere(const volgrid::Volume& vol, const SphereSpec& spec,
                              common::Rng& rng) {
    if (!(spec.radius_mm > 0))
        throw common::validation_error("inject_sphere: radius must be > 0");
    if (spec.sd_hu < 0)
        throw common::validation_error("inject_sphere: sd must be >= 0");
    const auto e = bounding_box(spec.center, spec.radius_mm, vol.spacing);
    for (int a = 0; a < 3; ++a)
        if (e.lo[a] < 0 || e.hi[a] >= vol.shape[a])
            throw common::bounds_error("inject_sphere: sphere exits volume bounds");

    volgrid::Volume out = vol;
    const double r2 = spec.radius_mm * spec.radius_mm;
    for (int z = e.lo[2]; z <= e.hi[2]; ++z)
        for (int y = e.lo[1]; y <= e.hi[1]; ++y)
            for (int x = e.lo[0]; x <= e.hi[0]; ++x) {
                const double dx = (x - spec.center[0]) * vol.spacing[0];
                const double dy = (y - spec.center[1]) * vol.spacing[1];
                const double dz = (z - spec.center[2]) * vol.spacing[2];
                if (dx * dx + dy * dy + dz * dz <= r2)
                    out.at(x, y, z) =
                        static_cast<float>(rng.gaussian(spec.mean_hu, spec.sd_hu));
            }
    return out;
}

size_t sphere_voxel_count(const volgrid::Volume& vol, const std::array<int, 3>& center,
                          double radius_mm) {
    const auto e = bounding_box(center, radius_mm, vol.spacing);
    const double r2 = radius_mm * radius_mm;
    size_t n = 0;
    for (int z = std::max(e.lo[2], 0); z <= std::min(e.hi[2], vol.shape[2] - 1); ++z)
        for (int y = std::max(e.lo[1], 0); y <= std::min(e.hi[1], vol.shape[1] - 1); ++y)
            for (int x = std::max(e.lo[0], 0); x <= std::min(e.hi[0], vol.shape[0] - 1); ++x) {
                const double dx = (x - center[0]) * vol.spacing[0];
                const double dy = (y - center[1]) * vol.spacing[1];
                const double dz = (z - center[2]) * vol.spacing[2];
                n += dx * dx + dy * dy + dz * dz <= r2;
            }
    return n;
}

}  // namespace synthlab
