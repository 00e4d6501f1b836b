#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "volgrid/volume.hpp"

using volgrid::Volume;
using volgrid::WindowSpec;

namespace {

Volume ramp_volume(std::array<int, 3> shape, std::array<double, 3> spacing) {
    Volume v = volgrid::make_volume(shape, spacing);
    for (int z = 0; z < shape[2]; ++z)
        for (int y = 0; y < shape[1]; ++y)
            for (int x = 0; x < shape[0]; ++x)
                v.at(x, y, z) = static_cast<float>(2.0 * x - 3.0 * y + 5.0 * z);
    return v;
}

}  // namespace

TEST_CASE("window_map midpoint, bounds and clipping") {
    Volume v = volgrid::make_volume({3, 1, 1}, {1, 1, 1});
    v.data = {50.0f, 100.0f, 500.0f};
    WindowSpec spec{50.0, 100.0, 0.0, 1.0};
    Volume out = volgrid::window_map(v, spec);
    CHECK(out.data[0] == doctest::Approx(0.5));
    CHECK(out.data[1] == doctest::Approx(1.0));
    CHECK(out.data[2] == doctest::Approx(1.0));  // clipped
}

TEST_CASE("window_map broad head window to [-1, 1]") {
    Volume v = volgrid::make_volume({1, 1, 1}, {1, 1, 1}, 140.0f);
    Volume out = volgrid::window_map(v, {40.0, 400.0, -1.0, 1.0});
    CHECK(out.data[0] == doctest::Approx(0.5));
}

TEST_CASE("window_map rejects invalid specs") {
    Volume v = volgrid::make_volume({1, 1, 1}, {1, 1, 1});
    CHECK_THROWS_AS(volgrid::window_map(v, {0.0, -1.0, 0.0, 1.0}),
                    common::validation_error);
    CHECK_THROWS_AS(volgrid::window_map(v, {0.0, 1.0, 1.0, 1.0}),
                    common::validation_error);
}

TEST_CASE("window_map is monotone and idempotent under the identity re-window") {
    common::Rng rng(7);
    Volume v = volgrid::make_volume({64, 1, 1}, {1, 1, 1});
    for (auto& d : v.data) d = static_cast<float>(rng.uniform(-1200, 2000));
    WindowSpec spec{40.0, 400.0, 0.0, 1.0};
    Volume once = volgrid::window_map(v, spec);
    for (size_t i = 0; i + 1 < v.data.size(); ++i)
        if (v.data[i] <= v.data[i + 1])
            CHECK(once.data[i] <= once.data[i + 1] + 1e-7f);
    // identity re-window over [0,1]
    Volume twice = volgrid::window_map(once, {0.5, 1.0, 0.0, 1.0});
    for (size_t i = 0; i < once.data.size(); ++i)
        CHECK(twice.data[i] == doctest::Approx(once.data[i]).epsilon(1e-6));
}

TEST_CASE("resample_linear preserves constants") {
    Volume v = volgrid::make_volume({4, 5, 6}, {1, 1, 2}, 7.0f);
    Volume out = volgrid::resample_linear(v, {3, 9, 4});
    for (float d : out.data) CHECK(d == doctest::Approx(7.0));
    CHECK(out.spacing[2] == doctest::Approx(2.0 * 6 / 4));
}

TEST_CASE("identity resample is exact") {
    Volume v = ramp_volume({5, 4, 3}, {1.0, 2.0, 5.0});
    Volume out = volgrid::resample_linear(v, v.shape);
    for (size_t i = 0; i < v.data.size(); ++i)
        CHECK(std::abs(out.data[i] - v.data[i]) <=
              1e-6f * std::max(1.0f, std::abs(v.data[i])));
}

TEST_CASE("degenerate 1D resample matches hand-computed linear interpolation") {
    Volume v = volgrid::make_volume({1, 1, 2}, {1, 1, 1});
    v.data = {0.0f, 10.0f};
    Volume out = volgrid::resample_linear(v, {1, 1, 3});
    REQUIRE(out.data.size() == 3);
    CHECK(out.data[0] == doctest::Approx(0.0));
    CHECK(out.data[1] == doctest::Approx(5.0));
    CHECK(out.data[2] == doctest::Approx(10.0));
}

TEST_CASE("up-down resample reproduces constant and ramp volumes") {
    for (bool use_ramp : {false, true}) {
        Volume v = use_ramp ? ramp_volume({6, 6, 4}, {1, 1, 2.5})
                            : volgrid::make_volume({6, 6, 4}, {1, 1, 2.5}, 3.5f);
        Volume up = volgrid::resample_linear(v, {12, 12, 8});
        Volume down = volgrid::resample_linear(up, v.shape);
        for (size_t i = 0; i < v.data.size(); ++i)
            CHECK(std::abs(down.data[i] - v.data[i]) <=
                  1e-5f * std::max(1.0f, std::abs(v.data[i])));
    }
}

TEST_CASE("resample output stays within the input range") {
    common::Rng rng(11);
    Volume v = volgrid::make_volume({7, 5, 4}, {1, 1, 1});
    float lo = 1e9f, hi = -1e9f;
    for (auto& d : v.data) {
        d = static_cast<float>(rng.uniform(-100, 100));
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    Volume out = volgrid::resample_linear(v, {13, 3, 9});
    for (float d : out.data) {
        CHECK(d >= lo - 1e-4f);
        CHECK(d <= hi + 1e-4f);
    }
}

TEST_CASE("extract_slab identity, permutation and duplication") {
    Volume v = ramp_volume({3, 3, 6}, {1, 1, 1});
    Volume same = volgrid::extract_slab(v, {0, 1, 2});
    Volume three = volgrid::extract_slab(v, {0, 1, 2, 3, 4, 5});
    CHECK(three.data == v.data);
    for (int k = 0; k < 3; ++k)
        for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 3; ++x) CHECK(same.at(x, y, k) == v.at(x, y, k));

    Volume perm = volgrid::extract_slab(v, {2, 0, 1});
    const int order[3] = {2, 0, 1};
    for (int k = 0; k < 3; ++k)
        for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 3; ++x) CHECK(perm.at(x, y, k) == v.at(x, y, order[k]));

    Volume dup = volgrid::extract_slab(v, {5, 5, 5});
    for (int k = 0; k < 3; ++k)
        for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 3; ++x) CHECK(dup.at(x, y, k) == v.at(x, y, 5));
}

TEST_CASE("extract_slab bounds checking") {
    Volume v = volgrid::make_volume({2, 2, 3}, {1, 1, 1});
    CHECK_THROWS_AS(volgrid::extract_slab(v, {0, 3}), common::bounds_error);
    CHECK_THROWS_AS(volgrid::extract_slab(v, {-1}), common::bounds_error);
}

TEST_CASE("extract_slab never reads outside the listed slices") {
    // poison the other slices with NaN and check nothing leaks through
    Volume v = volgrid::make_volume({4, 4, 5}, {1, 1, 1});
    for (int z = 0; z < 5; ++z)
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x)
                v.at(x, y, z) = (z == 1 || z == 3)
                                    ? static_cast<float>(x + y + z)
                                    : std::numeric_limits<float>::quiet_NaN();
    Volume out = volgrid::extract_slab(v, {1, 3, 1});
    for (float d : out.data) CHECK(std::isfinite(d));
}

TEST_CASE("volume validation catches bad shapes and non-finite data") {
    CHECK_THROWS_AS(volgrid::make_volume({0, 1, 1}, {1, 1, 1}),
                    common::validation_error);
    CHECK_THROWS_AS(volgrid::make_volume({1, 1, 1}, {1, 0, 1}),
                    common::validation_error);
    Volume v = volgrid::make_volume({1, 1, 1}, {1, 1, 1});
    v.data[0] = std::numeric_limits<float>::infinity();
    CHECK_THROWS_AS(volgrid::validate_volume(v), common::validation_error);
}
