#pragma once

#include <optional>
#include <string>
#include <vector>

#include "synthlab/sphere.hpp"

namespace synthlab {

enum class Tier { Easy, Medium, Hard };

std::string tier_name(Tier t);
Tier tier_from_string(const std::string& s);

// Difficulty mixture: the given fraction of positives (per manufacturer,
// largest-remainder rounded) receives small low-contrast spheres instead of
// the large high-contrast ones, at the same saved center.
struct TierSpec {
    Tier tier = Tier::Easy;
    double small_fraction = 0.0;  // easy 0.0, medium 0.20, hard 0.35
    std::array<double, 2> large_radius_range_mm{21.0, 26.0};
    std::array<double, 2> small_radius_range_mm{13.0, 17.0};
    double large_mean_hu = 50.0, large_sd_hu = 2.0;
    double small_mean_hu = 40.0, small_sd_hu = 2.0;
};

TierSpec tier_spec(Tier t);

struct TierStudyInput {
    std::string study_id;
    imgio::Manufacturer manufacturer = imgio::Manufacturer::Other;
    const volgrid::Volume* volume = nullptr;
    const BrainMask* mask = nullptr;  // required for positives
    bool positive = false;
};

struct TierCase {
    std::string study_id;
    imgio::Manufacturer manufacturer = imgio::Manufacturer::Other;
    int label = 0;
    volgrid::Volume volume;
    // sphere bookkeeping, meaningful when label == 1
    std::array<int, 3> center{0, 0, 0};
    double radius_mm = 0.0;
    double mean_hu = 0.0;
    bool small_sphere = false;
};

struct TierDataset {
    Tier tier = Tier::Easy;
    uint64_t seed = 0;
    std::vector<TierCase> cases;
};

// Which positives receive small spheres. A prefix of a per-manufacturer
// seed-keyed shuffle, so the hard subset contains the medium subset for the
// same seed.
std::vector<std::string> small_sphere_subset(
    const std::vector<std::pair<std::string, imgio::Manufacturer>>& positives,
    double fraction, uint64_t seed);

// Builds one labeled case. Center and large radius are a pure function of
// (seed, study_id, mask), so every tier reuses the same saved center.
TierCase build_tier_case(const TierStudyInput& study, const TierSpec& spec,
                         bool small_sphere, uint64_t seed);

// Full dataset pass: validates the positive designation is balanced per
// manufacturer (counts may differ by one), injects spheres, emits labels.
TierDataset build_tier_dataset(const std::vector<TierStudyInput>& studies,
                               const TierSpec& spec, uint64_t seed);

// Resamples a volume/mask pair along the craniocaudal axis (volume linear,
// mask nearest-neighbor re-binarized).
std::pair<volgrid::Volume, BrainMask> resample_for_segmentation(
    const volgrid::Volume& vol, const BrainMask& mask, int target_slices = 32);

}  // namespace synthlab
