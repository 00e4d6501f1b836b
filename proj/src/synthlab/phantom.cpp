#include "synthlab/phantom.hpp"

#include <cmath>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace synthlab {

std::string signature_name(Signature s) { return s == Signature::A ? "A" : "B"; }

Signature signature_from_string(const std::string& s) {
    if (s == "A") return Signature::A;
    if (s == "B") return Signature::B;
    throw common::format_error("unknown signature: " + s);
}

imgio::Manufacturer signature_manufacturer(Signature s) {
    return s == Signature::A ? imgio::Manufacturer::GE : imgio::Manufacturer::Siemens;
}

SignatureParams default_signature_params(Signature s) {
    SignatureParams p;
    if (s == Signature::B) {
        p.kernel_width = 3;
        p.streak_amplitude_hu = 3.0;
    }
    return p;
}

void validate_phantom_spec(const PhantomSpec& spec) {
    if (spec.shape[0] < 1 || spec.shape[1] < 1 || spec.shape[2] < 1)
        throw common::validation_error("phantom: shape components must be >= 1");
    if (spec.spacing[0] <= 0 || spec.spacing[1] <= 0 || spec.spacing[2] <= 0)
        throw common::validation_error("phantom: spacing components must be > 0");
    if (spec.noise.noise_variance_hu2 < 0)
        throw common::validation_error("phantom: noise variance must be >= 0");
    if (spec.noise.kernel_width < 1 || spec.noise.kernel_width % 2 == 0)
        throw common::validation_error("phantom: kernel width must be odd and >= 1");
    for (double a : spec.skull_semi_axes_mm)
        if (a <= 0) throw common::validation_error("phantom: semi-axes must be > 0");
    if (spec.skull_thickness_mm <= 0)
        throw common::validation_error("phantom: skull thickness must be > 0");
}

namespace {

// squared normalized ellipsoid coordinate of a voxel center relative to the
// volume's physical center; <= 1 means inside
double ellipsoid_r2(const PhantomSpec& spec, const std::array<double, 3>& semi, int x,
                    int y, int z) {
    double r2 = 0;
    const int idx[3] = {x, y, z};
    for (int a = 0; a < 3; ++a) {
        const double center = 0.5 * spec.shape[a] * spec.spacing[a];
        const double p = (idx[a] + 0.5) * spec.spacing[a] - center;
        const double q = p / semi[a];
        r2 += q * q;
    }
    return r2;
}

std::array<double, 3> inner_semi_axes(const PhantomSpec& spec) {
    return {spec.skull_semi_axes_mm[0] - spec.skull_thickness_mm,
            spec.skull_semi_axes_mm[1] - spec.skull_thickness_mm,
            spec.skull_semi_axes_mm[2] - spec.skull_thickness_mm};
}

}  // namespace

bool inside_brain_ellipsoid(const PhantomSpec& spec, int x, int y, int z) {
    return ellipsoid_r2(spec, inner_semi_axes(spec), x, y, z) <= 1.0;
}

Phantom gen_phantom(const PhantomSpec& spec) {
    validate_phantom_spec(spec);
    const int nx = spec.shape[0], ny = spec.shape[1], nz = spec.shape[2];
    const size_t n = static_cast<size_t>(nx) * ny * nz;

    volgrid::Volume vol;
    vol.shape = spec.shape;
    vol.spacing = spec.spacing;
    vol.data.resize(n);

    const auto inner = inner_semi_axes(spec);
    const double lx = nx * spec.spacing[0], ly = ny * spec.spacing[1],
                 lz = nz * spec.spacing[2];
    size_t i = 0;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x, ++i) {
                const double r_outer =
                    ellipsoid_r2(spec, spec.skull_semi_axes_mm, x, y, z);
                double v = spec.background_hu;
                if (r_outer <= 1.0) {
                    if (ellipsoid_r2(spec, inner, x, y, z) <= 1.0) {
                        // smooth interior modulation, fixed by geometry
                        const double px = (x + 0.5) * spec.spacing[0] / lx;
                        const double py = (y + 0.5) * spec.spacing[1] / ly;
                        const double pz = (z + 0.5) * spec.spacing[2] / lz;
                        v = spec.brain_hu +
                            spec.brain_variation_hu * std::cos(2.0 * M_PI * px) *
                                std::cos(2.0 * M_PI * py) *
                                std::cos(2.0 * M_PI * pz);
                    } else {
                        v = spec.bone_hu;
                    }
                }
                vol.data[i] = static_cast<float>(v);
            }

    // signature noise
    if (spec.noise.noise_variance_hu2 > 0) {
        const double sd = std::sqrt(spec.noise.noise_variance_hu2);
        common::Rng rng(common::derive_seed(spec.seed, "phantom-noise"));
        std::vector<double> white(n);
        for (size_t j = 0; j < n; ++j) white[j] = rng.next_gaussian();

        if (spec.noise.kernel_width <= 1) {
            for (size_t j = 0; j < n; ++j)
                vol.data[j] = static_cast<float>(vol.data[j] + sd * white[j]);
        } else {
            // box moving average, per-voxel rescale back to unit variance
            const int h = spec.noise.kernel_width / 2;
            size_t j = 0;
            for (int z = 0; z < nz; ++z)
                for (int y = 0; y < ny; ++y)
                    for (int x = 0; x < nx; ++x, ++j) {
                        double acc = 0;
                        int cnt = 0;
                        for (int dz = -h; dz <= h; ++dz) {
                            const int zz = z + dz;
                            if (zz < 0 || zz >= nz) continue;
                            for (int dy = -h; dy <= h; ++dy) {
                                const int yy = y + dy;
                                if (yy < 0 || yy >= ny) continue;
                                for (int dx = -h; dx <= h; ++dx) {
                                    const int xx = x + dx;
                                    if (xx < 0 || xx >= nx) continue;
                                    acc += white[static_cast<size_t>(xx) +
                                                 static_cast<size_t>(nx) *
                                                     (static_cast<size_t>(yy) +
                                                      static_cast<size_t>(ny) * zz)];
                                    ++cnt;
                                }
                            }
                        }
                        const double corr = acc / std::sqrt(static_cast<double>(cnt));
                        vol.data[j] = static_cast<float>(vol.data[j] + sd * corr);
                    }
        }
    }
    if (spec.noise.streak_amplitude_hu != 0.0) {
        const double w = 2.0 * M_PI / spec.noise.streak_period_vox;
        size_t j = 0;
        for (int z = 0; z < nz; ++z)
            for (int y = 0; y < ny; ++y) {
                const float s =
                    static_cast<float>(spec.noise.streak_amplitude_hu * std::sin(w * y));
                for (int x = 0; x < nx; ++x, ++j) vol.data[j] += s;
            }
    }

    Phantom out;
    out.volume = std::move(vol);
    out.meta.manufacturer = signature_manufacturer(spec.signature);
    out.meta.manufacturer_raw = out.meta.manufacturer == imgio::Manufacturer::GE
                                    ? "GE MEDICAL SYSTEMS"
                                    : "SIEMENS";
    out.meta.series_description = "AXIAL HEAD PHANTOM";
    out.meta.slice_thickness_mm = spec.spacing[2];
    common::Rng demo(common::derive_seed(spec.seed, "phantom-demographics"));
    out.meta.patient_age_years = 40 + static_cast<int>(demo.next_below(41));
    out.meta.patient_sex = demo.next_below(2) ? imgio::Sex::F : imgio::Sex::M;
    return out;
}

}  // namespace synthlab
