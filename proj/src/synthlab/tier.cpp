#include "synthlab/tier.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "common/error.hpp"

namespace synthlab {

std::string tier_name(Tier t) {
    switch (t) {
        case Tier::Easy: return "easy";
        case Tier::Medium: return "medium";
        default: return "hard";
    }
}

Tier tier_from_string(const std::string& s) {
    if (s == "easy") return Tier::Easy;
    if (s == "medium") return Tier::Medium;
    if (s == "hard") return Tier::Hard;
    throw common::format_error("unknown tier: " + s);
}

TierSpec tier_spec(Tier t) {
    TierSpec spec;
    spec.tier = t;
    switch (t) {
        case Tier::Easy: spec.small_fraction = 0.0; break;
        case Tier::Medium: spec.small_fraction = 0.20; break;
        case Tier::Hard: spec.small_fraction = 0.35; break;
    }
    return spec;
}

std::vector<std::string> small_sphere_subset(
    const std::vector<std::pair<std::string, imgio::Manufacturer>>& positives,
    double fraction, uint64_t seed) {
    if (fraction < 0.0 || fraction > 1.0)
        throw common::validation_error("small fraction must lie in [0, 1]");
    std::map<std::string, std::vector<std::string>> by_group;
    for (const auto& [id, m] : positives) by_group[imgio::manufacturer_name(m)].push_back(id);
    for (auto& [g, ids] : by_group) std::sort(ids.begin(), ids.end());

    // largest-remainder quotas per manufacturer
    const long long total =
        std::llround(fraction * static_cast<double>(positives.size()));
    std::map<std::string, int> quota;
    std::vector<std::pair<double, std::string>> remainders;
    long long assigned = 0;
    for (const auto& [g, ids] : by_group) {
        const double exact = fraction * static_cast<double>(ids.size());
        const int base = static_cast<int>(std::floor(exact));
        quota[g] = base;
        assigned += base;
        remainders.emplace_back(exact - base, g);
    }
    std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (long long i = 0; i < total - assigned && i < static_cast<long long>(remainders.size()); ++i)
        quota[remainders[static_cast<size_t>(i)].second]++;

    std::vector<std::string> subset;
    for (auto& [g, ids] : by_group) {
        common::Rng rng(common::derive_seed(seed, "small-subset/" + g));
        rng.shuffle(ids);
        const int k = std::min<int>(quota[g], static_cast<int>(ids.size()));
        subset.insert(subset.end(), ids.begin(), ids.begin() + k);
    }
    std::sort(subset.begin(), subset.end());
    return subset;
}

TierCase build_tier_case(const TierStudyInput& study, const TierSpec& spec,
                         bool small_sphere, uint64_t seed) {
    TierCase out;
    out.study_id = study.study_id;
    out.manufacturer = study.manufacturer;
    if (!study.volume)
        throw common::validation_error("tier case: missing volume for " + study.study_id);
    if (!study.positive) {
        out.label = 0;
        out.volume = *study.volume;
        return out;
    }
    if (!study.mask)
        throw common::validation_error("tier case: missing mask for positive " +
                                       study.study_id);

    common::Rng place(common::derive_seed(seed, "place/" + study.study_id));
    const double large_radius =
        place.uniform(spec.large_radius_range_mm[0], spec.large_radius_range_mm[1]);
    const auto center = sample_center(*study.mask, large_radius, place);

    SphereSpec sphere;
    sphere.center = center;
    if (small_sphere) {
        common::Rng small_rng(common::derive_seed(seed, "small-radius/" + study.study_id));
        sphere.radius_mm = small_rng.uniform(spec.small_radius_range_mm[0],
                                             spec.small_radius_range_mm[1]);
        sphere.mean_hu = spec.small_mean_hu;
        sphere.sd_hu = spec.small_sd_hu;
    } else {
        sphere.radius_mm = large_radius;
        sphere.mean_hu = spec.large_mean_hu;
        sphere.sd_hu = spec.large_sd_hu;
    }
    common::Rng noise(common::derive_seed(seed, "sphere-noise/" + study.study_id));
    out.volume = inject_sphere(*study.volume, sphere, noise);
    out.label = 1;
    out.center = sphere.center;
    out.radius_mm = sphere.radius_mm;
    out.mean_hu = sphere.mean_hu;
    out.small_sphere = small_sphere;
    return out;
}

TierDataset build_tier_dataset(const std::vector<TierStudyInput>& studies,
                               const TierSpec& spec, uint64_t seed) {
    std::map<std::string, std::pair<int, int>> counts;  // group -> (pos, neg)
    std::vector<std::pair<std::string, imgio::Manufacturer>> positives;
    for (const auto& s : studies) {
        auto& c = counts[imgio::manufacturer_name(s.manufacturer)];
        if (s.positive) {
            c.first++;
            positives.emplace_back(s.study_id, s.manufacturer);
        } else {
            c.second++;
        }
    }
    for (const auto& [g, c] : counts)
        if (std::abs(c.first - c.second) > 1)
            throw common::validation_error(
                "tier dataset: positive designation unbalanced for " + g + " (" +
                std::to_string(c.first) + " positive vs " + std::to_string(c.second) +
                " negative)");

    const auto subset = small_sphere_subset(positives, spec.small_fraction, seed);
    auto is_small = [&](const std::string& id) {
        return std::binary_search(subset.begin(), subset.end(), id);
    };

    TierDataset ds;
    ds.tier = spec.tier;
    ds.seed = seed;
    ds.cases.reserve(studies.size());
    for (const auto& s : studies)
        ds.cases.push_back(build_tier_case(s, spec, s.positive && is_small(s.study_id), seed));
    return ds;
}

std::pair<volgrid::Volume, BrainMask> resample_for_segmentation(
    const volgrid::Volume& vol, const BrainMask& mask, int target_slices) {
    if (vol.shape != mask.shape)
        throw common::validation_error("segmentation pair: volume/mask shape mismatch");
    if (target_slices < 1)
        throw common::validation_error("segmentation pair: target slices must be >= 1");
    if (vol.shape[2] == target_slices) {
        return {vol, mask};
    }
    const std::array<int, 3> target{vol.shape[0], vol.shape[1], target_slices};
    volgrid::Volume v = volgrid::resample_linear(vol, target);
    volgrid::Volume m = volgrid::resample_nearest(mask_to_volume(mask), target);
    return {std::move(v), mask_from_volume(m)};
}

}  // namespace synthlab
