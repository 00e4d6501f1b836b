#pragma once

#include <array>
#include <cstdint>

#include "imgio/dicom.hpp"
#include "volgrid/volume.hpp"

namespace synthlab {

// Scanner signature stand-in: A stamps white noise, B stamps spatially
// correlated noise (box moving average rescaled to equal per-voxel variance)
// plus an optional low-amplitude periodic streak.
enum class Signature { A, B };

std::string signature_name(Signature s);
Signature signature_from_string(const std::string& s);

// Phantom signatures map onto the cohort manufacturer axis so the rest of
// the pipeline stratifies on them unchanged.
imgio::Manufacturer signature_manufacturer(Signature s);

struct SignatureParams {
    double noise_variance_hu2 = 25.0;  // per-voxel variance of the stamped noise
    int kernel_width = 1;              // 1 = white; odd widths > 1 correlate
    double streak_amplitude_hu = 0.0;
    double streak_period_vox = 8.0;
};

SignatureParams default_signature_params(Signature s);

struct PhantomSpec {
    std::array<int, 3> shape{64, 64, 16};
    std::array<double, 3> spacing{3.0, 3.0, 6.0};  // mm
    Signature signature = Signature::A;
    SignatureParams noise = default_signature_params(Signature::A);
    std::array<double, 3> skull_semi_axes_mm{80.0, 84.0, 42.0};  // outer ellipsoid
    double skull_thickness_mm = 6.0;
    double bone_hu = 1200.0;
    double brain_hu = 30.0;
    double brain_variation_hu = 5.0;  // smooth interior modulation amplitude
    double background_hu = -1000.0;
    uint64_t seed = 0;
};

void validate_phantom_spec(const PhantomSpec& spec);

struct Phantom {
    volgrid::Volume volume;
    imgio::SeriesMeta meta;
};

// Deterministic in spec.seed: air background, ellipsoidal bone shell, brain
// interior with mild smooth variation, additive signature noise.
Phantom gen_phantom(const PhantomSpec& spec);

// Analytic brain region (inner ellipsoid) for mask-quality oracles.
bool inside_brain_ellipsoid(const PhantomSpec& spec, int x, int y, int z);

}  // namespace synthlab
