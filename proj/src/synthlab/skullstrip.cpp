#include "synthlab/skullstrip.hpp"

#include <algorithm>
#include <queue>

#include "common/error.hpp"

namespace synthlab {

size_t BrainMask::count() const {
    size_t n = 0;
    for (uint8_t v : data) n += v != 0;
    return n;
}

namespace {

// 2D flood fill over a per-slice predicate grid, seeded from the slice border.
// Returns reached[] for the slice.
void flood_slice_from_border(const std::vector<uint8_t>& open, int nx, int ny,
                             std::vector<uint8_t>& reached) {
    reached.assign(static_cast<size_t>(nx) * ny, 0);
    std::queue<std::pair<int, int>> q;
    auto push = [&](int x, int y) {
        size_t i = static_cast<size_t>(x) + static_cast<size_t>(nx) * y;
        if (open[i] && !reached[i]) {
            reached[i] = 1;
            q.emplace(x, y);
        }
    };
    for (int x = 0; x < nx; ++x) {
        push(x, 0);
        push(x, ny - 1);
    }
    for (int y = 0; y < ny; ++y) {
        push(0, y);
        push(nx - 1, y);
    }
    while (!q.empty()) {
        auto [x, y] = q.front();
        q.pop();
        if (x > 0) push(x - 1, y);
        if (x < nx - 1) push(x + 1, y);
        if (y > 0) push(x, y - 1);
        if (y < ny - 1) push(x, y + 1);
    }
}

// Largest 6-connected 3D component of a binary grid.
void keep_largest_component(std::vector<uint8_t>& mask, int nx, int ny, int nz) {
    std::vector<int32_t> label(mask.size(), 0);
    int32_t next = 0;
    size_t best_size = 0;
    int32_t best_label = 0;
    std::vector<size_t> stack;
    auto idx = [&](int x, int y, int z) {
        return static_cast<size_t>(x) +
               static_cast<size_t>(nx) * (static_cast<size_t>(y) +
               static_cast<size_t>(ny) * static_cast<size_t>(z));
    };
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                size_t i = idx(x, y, z);
                if (!mask[i] || label[i]) continue;
                ++next;
                size_t size = 0;
                stack.push_back(i);
                label[i] = next;
                while (!stack.empty()) {
                    size_t j = stack.back();
                    stack.pop_back();
                    ++size;
                    int zx = static_cast<int>(j / (static_cast<size_t>(nx) * ny));
                    int rem = static_cast<int>(j % (static_cast<size_t>(nx) * ny));
                    int yx = rem / nx;
                    int xx = rem % nx;
                    const int dx[6] = {1, -1, 0, 0, 0, 0};
                    const int dy[6] = {0, 0, 1, -1, 0, 0};
                    const int dz[6] = {0, 0, 0, 0, 1, -1};
                    for (int d = 0; d < 6; ++d) {
                        int X = xx + dx[d], Y = yx + dy[d], Z = zx + dz[d];
                        if (X < 0 || X >= nx || Y < 0 || Y >= ny || Z < 0 || Z >= nz)
                            continue;
                        size_t k = idx(X, Y, Z);
                        if (mask[k] && !label[k]) {
                            label[k] = next;
                            stack.push_back(k);
                        }
                    }
                }
                if (size > best_size) {
                    best_size = size;
                    best_label = next;
                }
            }
    for (size_t i = 0; i < mask.size(); ++i) mask[i] = label[i] == best_label && mask[i];
}

}  // namespace

BrainMask strip_skull(const volgrid::Volume& vol, const SkullStripParams& params) {
    const int nx = vol.shape[0], ny = vol.shape[1], nz = vol.shape[2];
    const size_t n = vol.voxel_count();
    const size_t slice = static_cast<size_t>(nx) * ny;

    // interior = not reachable from the slice border without crossing bone
    std::vector<uint8_t> open(slice), reached(slice), interior(n, 0);
    for (int z = 0; z < nz; ++z) {
        const float* p = vol.data.data() + slice * z;
        for (size_t i = 0; i < slice; ++i) open[i] = p[i] <= params.bone_hu;
        flood_slice_from_border(open, nx, ny, reached);
        uint8_t* out = interior.data() + slice * z;
        for (size_t i = 0; i < slice; ++i) out[i] = open[i] && !reached[i];
    }

    BrainMask mask;
    mask.shape = vol.shape;
    mask.spacing = vol.spacing;
    mask.data.assign(n, 0);
    for (size_t i = 0; i < n; ++i) {
        const float v = vol.data[i];
        mask.data[i] = interior[i] && v >= params.tissue_lo_hu && v <= params.tissue_hi_hu;
    }

    keep_largest_component(mask.data, nx, ny, nz);

    // per-slice hole fill, then re-apply the bone exclusion
    for (int z = 0; z < nz; ++z) {
        uint8_t* m = mask.data.data() + slice * z;
        for (size_t i = 0; i < slice; ++i) open[i] = !m[i];
        flood_slice_from_border(open, nx, ny, reached);
        for (size_t i = 0; i < slice; ++i)
            if (!m[i] && !reached[i]) m[i] = 1;
        const float* p = vol.data.data() + slice * z;
        for (size_t i = 0; i < slice; ++i)
            if (p[i] > params.bone_hu) m[i] = 0;
    }

    if (mask.count() == 0)
        throw common::validation_error("skull strip produced an empty mask");
    return mask;
}

volgrid::Volume mask_to_volume(const BrainMask& mask) {
    volgrid::Volume v;
    v.shape = mask.shape;
    v.spacing = mask.spacing;
    v.data.resize(mask.data.size());
    for (size_t i = 0; i < mask.data.size(); ++i) v.data[i] = mask.data[i] ? 1.0f : 0.0f;
    return v;
}

BrainMask mask_from_volume(const volgrid::Volume& vol, float threshold) {
    BrainMask m;
    m.shape = vol.shape;
    m.spacing = vol.spacing;
    m.data.resize(vol.data.size());
    for (size_t i = 0; i < vol.data.size(); ++i) m.data[i] = vol.data[i] > threshold;
    return m;
}

double dice_overlap(const BrainMask& a, const BrainMask& b) {
    if (a.shape != b.shape)
        throw common::shape_error("dice: mask shapes differ");
    size_t inter = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        bool va = a.data[i], vb = b.data[i];
        inter += va && vb;
        na += va;
        nb += vb;
    }
    if (na + nb == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

}  // namespace synthlab
