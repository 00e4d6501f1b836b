#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "synthlab/phantom.hpp"
#include "synthlab/skullstrip.hpp"
#include "synthlab/sphere.hpp"
#include "synthlab/tier.hpp"

using synthlab::BrainMask;
using synthlab::PhantomSpec;
using volgrid::Volume;

namespace {

PhantomSpec quiet_spec(uint64_t seed = 1) {
    PhantomSpec spec;
    spec.seed = seed;
    spec.noise.noise_variance_hu2 = 0.0;
    return spec;
}

BrainMask full_cube_mask(int n) {
    BrainMask m;
    m.shape = {n, n, n};
    m.spacing = {1, 1, 1};
    m.data.assign(static_cast<size_t>(n) * n * n, 1);
    return m;
}

}  // namespace

TEST_CASE("strip_skull recovers the phantom brain ellipsoid") {
    PhantomSpec spec;
    spec.seed = 11;
    auto ph = synthlab::gen_phantom(spec);
    auto mask = synthlab::strip_skull(ph.volume);

    BrainMask truth;
    truth.shape = spec.shape;
    truth.spacing = spec.spacing;
    truth.data.assign(mask.data.size(), 0);
    for (int z = 0; z < spec.shape[2]; ++z)
        for (int y = 0; y < spec.shape[1]; ++y)
            for (int x = 0; x < spec.shape[0]; ++x)
                truth.at(x, y, z) = synthlab::inside_brain_ellipsoid(spec, x, y, z);

    CHECK(synthlab::dice_overlap(mask, truth) >= 0.95);
}

TEST_CASE("strip_skull on all-air volume raises empty-mask error") {
    Volume air = volgrid::make_volume({16, 16, 8}, {3, 3, 6}, -1000.0f);
    CHECK_THROWS_AS(synthlab::strip_skull(air), common::validation_error);
}

TEST_CASE("strip_skull mask never includes bone-range voxels") {
    PhantomSpec spec;
    spec.seed = 12;
    auto ph = synthlab::gen_phantom(spec);
    auto mask = synthlab::strip_skull(ph.volume);
    size_t overlap = 0;
    for (size_t i = 0; i < mask.data.size(); ++i)
        overlap += mask.data[i] && ph.volume.data[i] > 300.0f;
    CHECK(overlap == 0);
}

TEST_CASE("strip_skull is stable under small added noise") {
    PhantomSpec spec = quiet_spec(13);
    auto base = synthlab::gen_phantom(spec).volume;
    auto mask_a = synthlab::strip_skull(base);

    common::Rng rng(99);
    Volume noisy = base;
    for (auto& v : noisy.data) v += static_cast<float>(rng.gaussian(0.0, 2.0));
    auto mask_b = synthlab::strip_skull(noisy);
    CHECK(synthlab::dice_overlap(mask_a, mask_b) >= 0.99);
}

TEST_CASE("sample_center honors containment on a full cube") {
    BrainMask m = full_cube_mask(50);
    common::Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        auto c = synthlab::sample_center(m, 1.0, rng);
        for (int a = 0; a < 3; ++a) {
            CHECK(c[a] >= 1);
            CHECK(c[a] <= 48);
        }
    }
}

TEST_CASE("sample_center reports infeasibility with the attempt count") {
    BrainMask m;
    m.shape = {5, 5, 5};
    m.spacing = {1, 1, 1};
    m.data.assign(125, 0);
    m.at(2, 2, 2) = 1;
    common::Rng rng(4);
    try {
        synthlab::sample_center(m, 2.0, rng, 64);
        FAIL("expected placement-infeasible");
    } catch (const common::placement_infeasible_error& e) {
        CHECK(std::string(e.what()).find("64") != std::string::npos);
    }
}

TEST_CASE("sample_center draws uniformly over the feasible region") {
    // spherical mask; oracle enumerates the feasible set by brute force
    BrainMask m;
    const int n = 21;
    m.shape = {n, n, n};
    m.spacing = {1, 1, 1};
    m.data.assign(static_cast<size_t>(n) * n * n, 0);
    const double c0 = (n - 1) / 2.0;
    for (int z = 0; z < n; ++z)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                const double d2 = (x - c0) * (x - c0) + (y - c0) * (y - c0) +
                                  (z - c0) * (z - c0);
                m.at(x, y, z) = d2 <= 9.5 * 9.5;
            }
    const double radius = 3.0;

    std::set<std::array<int, 3>> feasible;
    for (int z = 0; z < n; ++z)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                if (m.at(x, y, z) && synthlab::sphere_fits(m, {x, y, z}, radius))
                    feasible.insert({x, y, z});
    REQUIRE(feasible.size() > 100);

    // octant occupancy vs expectation (chi-square, 7 dof, alpha = 0.01)
    auto octant = [&](const std::array<int, 3>& c) {
        return (c[0] > c0 ? 1 : 0) + (c[1] > c0 ? 2 : 0) + (c[2] > c0 ? 4 : 0);
    };
    std::array<double, 8> expected{};
    for (const auto& c : feasible) expected[octant(c)] += 1.0;
    for (auto& e : expected) e *= 10000.0 / feasible.size();

    common::Rng rng(5);
    std::array<double, 8> observed{};
    for (int i = 0; i < 10000; ++i) {
        auto c = synthlab::sample_center(m, radius, rng);
        CHECK(feasible.count(c) == 1);
        observed[octant(c)] += 1.0;
    }
    double chi2 = 0;
    for (int k = 0; k < 8; ++k)
        if (expected[k] > 0)
            chi2 += (observed[k] - expected[k]) * (observed[k] - expected[k]) / expected[k];
    CHECK(chi2 < 18.48);  // chi2_{0.99, 7}
}

TEST_CASE("inject_sphere voxel count matches the analytic volume") {
    Volume v = volgrid::make_volume({40, 40, 40}, {1, 1, 1}, 0.0f);
    common::Rng rng(6);
    for (double r : {5.0, 7.5, 10.0}) {
        synthlab::SphereSpec spec{{20, 20, 20}, r, 50.0, 0.0};
        Volume out = synthlab::inject_sphere(v, spec, rng);
        size_t count = 0;
        for (float d : out.data) count += d != 0.0f;
        const double analytic = 4.0 / 3.0 * M_PI * r * r * r;
        CHECK(std::abs(static_cast<double>(count) - analytic) / analytic < 0.05);
        CHECK(count == synthlab::sphere_voxel_count(v, spec.center, r));
    }
}

TEST_CASE("inject_sphere with sd 0 writes the mean exactly and leaves the rest") {
    Volume v = volgrid::make_volume({20, 20, 10}, {1, 1, 2}, -7.0f);
    common::Rng rng(7);
    synthlab::SphereSpec spec{{10, 10, 5}, 4.0, 50.0, 0.0};
    Volume out = synthlab::inject_sphere(v, spec, rng);
    size_t inside = 0;
    for (int z = 0; z < 10; ++z)
        for (int y = 0; y < 20; ++y)
            for (int x = 0; x < 20; ++x) {
                const double dx = x - 10, dy = y - 10, dz = (z - 5) * 2.0;
                if (dx * dx + dy * dy + dz * dz <= 16.0) {
                    CHECK(out.at(x, y, z) == 50.0f);
                    ++inside;
                } else {
                    CHECK(out.at(x, y, z) == -7.0f);  // bitwise untouched
                }
            }
    CHECK(inside > 0);
    // input untouched
    for (float d : v.data) CHECK(d == -7.0f);
}

TEST_CASE("inject_sphere sample statistics follow the configured distribution") {
    Volume v = volgrid::make_volume({30, 30, 30}, {1, 1, 1}, 0.0f);
    common::Rng rng(8);
    synthlab::SphereSpec spec{{15, 15, 15}, 7.0, 50.0, 2.0};
    Volume out = synthlab::inject_sphere(v, spec, rng);
    std::vector<double> vals;
    for (float d : out.data)
        if (d != 0.0f) vals.push_back(d);
    REQUIRE(vals.size() >= 500);
    double mean = 0;
    for (double d : vals) mean += d;
    mean /= vals.size();
    double var = 0;
    for (double d : vals) var += (d - mean) * (d - mean);
    var /= vals.size() - 1;
    CHECK(std::abs(mean - 50.0) < 3.0 * 2.0 / std::sqrt(vals.size()));
    CHECK(std::abs(std::sqrt(var) - 2.0) < 0.4);
}

TEST_CASE("inject_sphere rejects out-of-bounds placements") {
    Volume v = volgrid::make_volume({10, 10, 10}, {1, 1, 1});
    common::Rng rng(9);
    synthlab::SphereSpec spec{{1, 5, 5}, 3.0, 50.0, 0.0};
    CHECK_THROWS_AS(synthlab::inject_sphere(v, spec, rng), common::bounds_error);
}

namespace {

struct TierFixture {
    std::vector<volgrid::Volume> volumes;
    std::vector<BrainMask> masks;
    std::vector<synthlab::TierStudyInput> studies;

    explicit TierFixture(int positives_per_group, int negatives_per_group) {
        const int total = 2 * (positives_per_group + negatives_per_group);
        volumes.reserve(total);
        masks.reserve(total);
        int k = 0;
        for (auto sig : {synthlab::Signature::A, synthlab::Signature::B}) {
            for (int i = 0; i < positives_per_group + negatives_per_group; ++i, ++k) {
                PhantomSpec spec;
                spec.signature = sig;
                spec.noise = synthlab::default_signature_params(sig);
                spec.seed = 1000 + k;
                auto ph = synthlab::gen_phantom(spec);
                volumes.push_back(std::move(ph.volume));
                masks.push_back(synthlab::strip_skull(volumes.back()));
            }
        }
        k = 0;
        for (auto sig : {synthlab::Signature::A, synthlab::Signature::B}) {
            for (int i = 0; i < positives_per_group + negatives_per_group; ++i, ++k) {
                synthlab::TierStudyInput s;
                s.study_id = "p" + std::to_string(k);
                s.manufacturer = synthlab::signature_manufacturer(sig);
                s.volume = &volumes[k];
                s.mask = &masks[k];
                s.positive = i < positives_per_group;
                studies.push_back(s);
            }
        }
    }
};

}  // namespace

TEST_CASE("tier datasets: sphere counts, radii, centers and nesting") {
    TierFixture fx(10, 10);  // 20 positives over two groups

    auto easy = synthlab::build_tier_dataset(fx.studies, synthlab::tier_spec(synthlab::Tier::Easy), 77);
    auto medium = synthlab::build_tier_dataset(fx.studies, synthlab::tier_spec(synthlab::Tier::Medium), 77);
    auto hard = synthlab::build_tier_dataset(fx.studies, synthlab::tier_spec(synthlab::Tier::Hard), 77);

    int easy_pos = 0;
    for (const auto& c : easy.cases) {
        if (!c.label) continue;
        ++easy_pos;
        CHECK(c.radius_mm >= 21.0);
        CHECK(c.radius_mm <= 26.0);
        CHECK_FALSE(c.small_sphere);
    }
    CHECK(easy_pos == 20);

    auto small_ids = [](const synthlab::TierDataset& ds) {
        std::set<std::string> ids;
        for (const auto& c : ds.cases)
            if (c.label && c.small_sphere) ids.insert(c.study_id);
        return ids;
    };
    auto med_small = small_ids(medium);
    auto hard_small = small_ids(hard);
    CHECK(med_small.size() == 4);   // 20% of 20
    CHECK(hard_small.size() == 7);  // 35% of 20, largest remainder

    for (const auto& id : med_small) CHECK(hard_small.count(id) == 1);

    // small spheres live in [13,17] mm, large keep the easy radius
    std::map<std::string, const synthlab::TierCase*> easy_by_id;
    for (const auto& c : easy.cases) easy_by_id[c.study_id] = &c;
    for (const auto& ds : {medium, hard}) {
        for (const auto& c : ds.cases) {
            if (!c.label) continue;
            const auto* e = easy_by_id.at(c.study_id);
            CHECK(c.center == e->center);  // saved center reused exactly
            if (c.small_sphere) {
                CHECK(c.radius_mm >= 13.0);
                CHECK(c.radius_mm <= 17.0);
                CHECK(c.mean_hu == 40.0);
            } else {
                CHECK(c.radius_mm == e->radius_mm);
                CHECK(c.mean_hu == 50.0);
            }
        }
    }

    // negatives bitwise untouched
    std::map<std::string, const synthlab::TierStudyInput*> inputs_by_id;
    for (const auto& s : fx.studies) inputs_by_id[s.study_id] = &s;
    for (const auto& c : easy.cases)
        if (!c.label) CHECK(c.volume.data == inputs_by_id.at(c.study_id)->volume->data);
}

TEST_CASE("tier dataset rejects unbalanced positive designation") {
    TierFixture fx(10, 10);
    auto studies = fx.studies;
    studies[10].positive = true;  // 11 positives vs 9 negatives in group A
    studies[11].positive = true;
    CHECK_THROWS_AS(
        synthlab::build_tier_dataset(studies, synthlab::tier_spec(synthlab::Tier::Easy), 1),
        common::validation_error);
}

TEST_CASE("resample_for_segmentation pairs 35 -> 32 slices") {
    PhantomSpec spec;
    spec.shape = {24, 24, 35};
    spec.spacing = {8.0, 8.0, 3.0};
    spec.skull_semi_axes_mm = {90.0, 90.0, 50.0};
    spec.seed = 5;
    auto ph = synthlab::gen_phantom(spec);
    auto mask = synthlab::strip_skull(ph.volume);
    auto [v32, m32] = synthlab::resample_for_segmentation(ph.volume, mask, 32);
    CHECK(v32.shape == std::array<int, 3>{24, 24, 32});
    CHECK(m32.shape == std::array<int, 3>{24, 24, 32});
    for (uint8_t b : m32.data) CHECK((b == 0 || b == 1));

    auto [v_same, m_same] = synthlab::resample_for_segmentation(v32, m32, 32);
    CHECK(v_same.data == v32.data);
    CHECK(m_same.data == m32.data);
}

TEST_CASE("resample_for_segmentation keeps constant masks constant") {
    Volume v = volgrid::make_volume({6, 6, 35}, {1, 1, 1}, 10.0f);
    BrainMask m;
    m.shape = v.shape;
    m.spacing = v.spacing;
    m.data.assign(v.voxel_count(), 1);
    auto [v32, m32] = synthlab::resample_for_segmentation(v, m, 32);
    for (uint8_t b : m32.data) CHECK(b == 1);
    for (float d : v32.data) CHECK(d == doctest::Approx(10.0f));
}

TEST_CASE("resample_for_segmentation validates pairing") {
    Volume v = volgrid::make_volume({6, 6, 35}, {1, 1, 1});
    BrainMask m;
    m.shape = {6, 6, 34};
    m.spacing = {1, 1, 1};
    m.data.assign(6 * 6 * 34, 0);
    CHECK_THROWS_AS(synthlab::resample_for_segmentation(v, m, 32),
                    common::validation_error);
}

TEST_CASE("gen_phantom is deterministic in the seed") {
    PhantomSpec spec;
    spec.seed = 21;
    spec.signature = synthlab::Signature::B;
    spec.noise = synthlab::default_signature_params(synthlab::Signature::B);
    auto a = synthlab::gen_phantom(spec);
    auto b = synthlab::gen_phantom(spec);
    CHECK(a.volume.data == b.volume.data);
    CHECK(a.meta.patient_age_years == b.meta.patient_age_years);

    spec.seed = 22;
    auto c = synthlab::gen_phantom(spec);
    CHECK(a.volume.data != c.volume.data);
}

TEST_CASE("noiseless phantom hits the brain base HU at the center") {
    PhantomSpec spec = quiet_spec(23);
    spec.brain_variation_hu = 0.0;
    auto ph = synthlab::gen_phantom(spec);
    const int cx = spec.shape[0] / 2, cy = spec.shape[1] / 2, cz = spec.shape[2] / 2;
    CHECK(ph.volume.at(cx, cy, cz) == doctest::Approx(spec.brain_hu));
    CHECK(ph.volume.at(0, 0, 0) == doctest::Approx(spec.background_hu));
}

TEST_CASE("signatures match in variance but differ in spatial autocorrelation") {
    // noise field isolated by subtracting the noiseless phantom
    auto field = [](synthlab::Signature sig) {
        PhantomSpec spec;
        spec.seed = 31;
        spec.signature = sig;
        spec.noise = synthlab::default_signature_params(sig);
        spec.noise.streak_amplitude_hu = 0.0;  // compare pure noise processes
        spec.noise.noise_variance_hu2 = 25.0;
        auto noisy = synthlab::gen_phantom(spec).volume;
        PhantomSpec quiet = spec;
        quiet.noise.noise_variance_hu2 = 0.0;
        auto base = synthlab::gen_phantom(quiet).volume;
        std::vector<double> f(noisy.data.size());
        for (size_t i = 0; i < f.size(); ++i) f[i] = noisy.data[i] - base.data[i];
        return std::make_pair(f, noisy.shape);
    };

    auto stats = [](const std::vector<double>& f, std::array<int, 3> shape) {
        double mean = 0;
        for (double v : f) mean += v;
        mean /= f.size();
        double var = 0;
        for (double v : f) var += (v - mean) * (v - mean);
        var /= f.size();
        // lag-1 autocorrelation along x
        double num = 0, cnt = 0;
        for (int z = 0; z < shape[2]; ++z)
            for (int y = 0; y < shape[1]; ++y)
                for (int x = 0; x + 1 < shape[0]; ++x) {
                    const size_t i = static_cast<size_t>(x) +
                                     static_cast<size_t>(shape[0]) *
                                         (y + static_cast<size_t>(shape[1]) * z);
                    num += (f[i] - mean) * (f[i + 1] - mean);
                    cnt += 1;
                }
        return std::make_pair(var, num / cnt / var);
    };

    auto [fa, sa] = field(synthlab::Signature::A);
    auto [fb, sb] = field(synthlab::Signature::B);
    auto [var_a, rho_a] = stats(fa, sa);
    auto [var_b, rho_b] = stats(fb, sb);

    CHECK(std::abs(var_a - var_b) / var_a < 0.10);
    CHECK(std::abs(rho_b - rho_a) >= 0.2);
}
