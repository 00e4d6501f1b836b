#include "volgrid/volume.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace volgrid {

Volume make_volume(std::array<int, 3> shape, std::array<double, 3> spacing, float fill) {
    Volume v;
    v.shape = shape;
    v.spacing = spacing;
    if (shape[0] < 1 || shape[1] < 1 || shape[2] < 1)
        throw common::validation_error("volume shape components must be >= 1");
    if (spacing[0] <= 0 || spacing[1] <= 0 || spacing[2] <= 0)
        throw common::validation_error("volume spacing components must be > 0");
    v.data.assign(v.voxel_count(), fill);
    return v;
}

void validate_volume(const Volume& vol) {
    if (vol.shape[0] < 1 || vol.shape[1] < 1 || vol.shape[2] < 1)
        throw common::validation_error("volume shape components must be >= 1");
    if (vol.spacing[0] <= 0 || vol.spacing[1] <= 0 || vol.spacing[2] <= 0)
        throw common::validation_error("volume spacing components must be > 0");
    if (vol.data.size() != vol.voxel_count())
        throw common::validation_error("volume data length does not match shape");
    for (float v : vol.data)
        if (!std::isfinite(v))
            throw common::validation_error("volume contains non-finite voxels");
}

void validate_window(const WindowSpec& spec) {
    if (!(spec.window > 0))
        throw common::validation_error("window width must be > 0");
    if (!(spec.out_lo < spec.out_hi))
        throw common::validation_error("window output range is degenerate");
}

Volume window_map(const Volume& vol, const WindowSpec& spec) {
    validate_window(spec);
    Volume out = vol;
    const double lo_hu = spec.level - spec.window / 2.0;
    const double scale = (spec.out_hi - spec.out_lo) / spec.window;
    const size_t n = out.data.size();
#pragma omp parallel for schedule(static)
    for (size_t i = 0; i < n; ++i) {
        double v = spec.out_lo + (static_cast<double>(vol.data[i]) - lo_hu) * scale;
        v = std::clamp(v, spec.out_lo, spec.out_hi);
        out.data[i] = static_cast<float>(v);
    }
    return out;
}

namespace {

// Source continuous index of a target voxel center under voxel-center
// alignment with invariant physical extent.
inline double source_coord(int i, double spacing_out, double spacing_in) {
    return ((i + 0.5) * spacing_out) / spacing_in - 0.5;
}

}  // namespace

Volume resample_linear(const Volume& vol, std::array<int, 3> target_shape) {
    if (target_shape[0] < 1 || target_shape[1] < 1 || target_shape[2] < 1)
        throw common::validation_error("resample target shape components must be >= 1");
    Volume out;
    out.shape = target_shape;
    out.origin = vol.origin;
    for (int a = 0; a < 3; ++a)
        out.spacing[a] = vol.spacing[a] * vol.shape[a] / target_shape[a];
    out.data.resize(out.voxel_count());

    const int nx = vol.shape[0], ny = vol.shape[1], nz = vol.shape[2];
    const int tx = target_shape[0], ty = target_shape[1], tz = target_shape[2];

    std::vector<int> x0(tx), x1(tx), y0(ty), y1(ty), z0(tz), z1(tz);
    std::vector<double> fx(tx), fy(ty), fz(tz);
    auto setup_axis = [](int t, int n, double sp_out, double sp_in, std::vector<int>& i0,
                         std::vector<int>& i1, std::vector<double>& f) {
        for (int i = 0; i < t; ++i) {
            double s = source_coord(i, sp_out, sp_in);
            s = std::clamp(s, 0.0, static_cast<double>(n - 1));
            int lo = static_cast<int>(std::floor(s));
            lo = std::min(lo, n - 1);
            i0[i] = lo;
            i1[i] = std::min(lo + 1, n - 1);
            f[i] = s - lo;
        }
    };
    setup_axis(tx, nx, out.spacing[0], vol.spacing[0], x0, x1, fx);
    setup_axis(ty, ny, out.spacing[1], vol.spacing[1], y0, y1, fy);
    setup_axis(tz, nz, out.spacing[2], vol.spacing[2], z0, z1, fz);

#pragma omp parallel for schedule(static)
    for (int z = 0; z < tz; ++z) {
        for (int y = 0; y < ty; ++y) {
            for (int x = 0; x < tx; ++x) {
                const double c000 = vol.at(x0[x], y0[y], z0[z]);
                const double c100 = vol.at(x1[x], y0[y], z0[z]);
                const double c010 = vol.at(x0[x], y1[y], z0[z]);
                const double c110 = vol.at(x1[x], y1[y], z0[z]);
                const double c001 = vol.at(x0[x], y0[y], z1[z]);
                const double c101 = vol.at(x1[x], y0[y], z1[z]);
                const double c011 = vol.at(x0[x], y1[y], z1[z]);
                const double c111 = vol.at(x1[x], y1[y], z1[z]);
                const double wx = fx[x], wy = fy[y], wz = fz[z];
                const double c00 = c000 + (c100 - c000) * wx;
                const double c10 = c010 + (c110 - c010) * wx;
                const double c01 = c001 + (c101 - c001) * wx;
                const double c11 = c011 + (c111 - c011) * wx;
                const double c0 = c00 + (c10 - c00) * wy;
                const double c1 = c01 + (c11 - c01) * wy;
                out.at(x, y, z) = static_cast<float>(c0 + (c1 - c0) * wz);
            }
        }
    }
    return out;
}

Volume resample_nearest(const Volume& vol, std::array<int, 3> target_shape) {
    if (target_shape[0] < 1 || target_shape[1] < 1 || target_shape[2] < 1)
        throw common::validation_error("resample target shape components must be >= 1");
    Volume out;
    out.shape = target_shape;
    out.origin = vol.origin;
    for (int a = 0; a < 3; ++a)
        out.spacing[a] = vol.spacing[a] * vol.shape[a] / target_shape[a];
    out.data.resize(out.voxel_count());
    std::array<std::vector<int>, 3> idx;
    for (int a = 0; a < 3; ++a) {
        idx[a].resize(target_shape[a]);
        for (int i = 0; i < target_shape[a]; ++i) {
            double s = source_coord(i, out.spacing[a], vol.spacing[a]);
            int j = static_cast<int>(std::lround(s));
            idx[a][i] = std::clamp(j, 0, vol.shape[a] - 1);
        }
    }
    for (int z = 0; z < target_shape[2]; ++z)
        for (int y = 0; y < target_shape[1]; ++y)
            for (int x = 0; x < target_shape[0]; ++x)
                out.at(x, y, z) = vol.at(idx[0][x], idx[1][y], idx[2][z]);
    return out;
}

Volume extract_slab(const Volume& vol, const std::vector<int>& slice_indices) {
    for (int k : slice_indices)
        if (k < 0 || k >= vol.shape[2])
            throw common::bounds_error("slice index out of range: " + std::to_string(k));
    Volume out;
    out.shape = {vol.shape[0], vol.shape[1], static_cast<int>(slice_indices.size())};
    out.spacing = vol.spacing;
    out.origin = vol.origin;
    out.data.resize(out.voxel_count());
    const size_t slice = static_cast<size_t>(vol.shape[0]) * vol.shape[1];
    for (size_t k = 0; k < slice_indices.size(); ++k) {
        const float* src = vol.data.data() + slice * slice_indices[k];
        std::copy(src, src + slice, out.data.data() + slice * k);
    }
    return out;
}

}  // namespace volgrid
