#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "imgio/dicom.hpp"
#include "imgio/nifti.hpp"

using volgrid::Volume;

namespace {

// test-side NIfTI fixture builder, independent of the production writer
std::vector<unsigned char> build_nifti_fixture(int16_t datatype,
                                               const std::vector<unsigned char>& payload,
                                               std::array<int16_t, 3> shape,
                                               float slope, float inter,
                                               const char* magic = "n+1") {
    std::vector<unsigned char> b(352 + payload.size(), 0);
    auto put = [&](size_t off, auto v) { std::memcpy(b.data() + off, &v, sizeof(v)); };
    put(0, int32_t{348});
    put(40, int16_t{3});
    put(42, shape[0]);
    put(44, shape[1]);
    put(46, shape[2]);
    for (int i = 4; i < 8; ++i) put(40 + 2 * i, int16_t{1});
    put(70, datatype);
    put(80, 1.0f);
    put(84, 1.0f);
    put(88, 5.0f);
    put(108, 352.0f);
    put(112, slope);
    put(116, inter);
    std::memcpy(b.data() + 344, magic, 4);
    std::memcpy(b.data() + 352, payload.data(), payload.size());
    return b;
}

// minimal explicit-VR little-endian DICOM fixture
struct DicomBuilder {
    std::vector<unsigned char> bytes;
    DicomBuilder() {
        bytes.assign(128, 0);
        bytes.insert(bytes.end(), {'D', 'I', 'C', 'M'});
    }
    DicomBuilder& add(uint16_t group, uint16_t elem, const char vr[2],
                      std::string value) {
        if (value.size() % 2) value += ' ';
        push16(group);
        push16(elem);
        bytes.push_back(vr[0]);
        bytes.push_back(vr[1]);
        push16(static_cast<uint16_t>(value.size()));
        bytes.insert(bytes.end(), value.begin(), value.end());
        return *this;
    }
    DicomBuilder& add_long(uint16_t group, uint16_t elem, const char vr[2],
                           const std::vector<unsigned char>& value) {
        push16(group);
        push16(elem);
        bytes.push_back(vr[0]);
        bytes.push_back(vr[1]);
        push16(0);
        push32(static_cast<uint32_t>(value.size()));
        bytes.insert(bytes.end(), value.begin(), value.end());
        return *this;
    }
    void push16(uint16_t v) {
        bytes.push_back(v & 0xff);
        bytes.push_back(v >> 8);
    }
    void push32(uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes.push_back((v >> (8 * i)) & 0xff);
    }
};

}  // namespace

TEST_CASE("nifti round-trip on a random float32 volume") {
    common::Rng rng(3);
    Volume v = volgrid::make_volume({4, 4, 4}, {0.5, 0.5, 5.0});
    v.origin = {1.0, -2.0, 3.5};
    for (auto& d : v.data) d = static_cast<float>(rng.uniform(-1000, 2000));
    auto bytes = imgio::write_nifti(v);
    auto rt = imgio::read_nifti(bytes);
    CHECK(rt.volume.shape == v.shape);
    CHECK(rt.volume.data == v.data);
    CHECK(rt.volume.spacing[0] == doctest::Approx(0.5));
    CHECK(rt.volume.spacing[2] == doctest::Approx(5.0));
    CHECK(rt.volume.origin[2] == doctest::Approx(3.5));
}

TEST_CASE("nifti int16 rescale: raw 1024 with inter -1024 decodes to 0 HU") {
    std::vector<unsigned char> payload(2);
    int16_t raw = 1024;
    std::memcpy(payload.data(), &raw, 2);
    auto bytes = build_nifti_fixture(imgio::kInt16, payload, {1, 1, 1}, 1.0f, -1024.0f);
    auto rt = imgio::read_nifti(bytes);
    CHECK(rt.volume.data[0] == doctest::Approx(0.0));
}

TEST_CASE("nifti uint8 and float64 payloads decode") {
    {
        auto bytes = build_nifti_fixture(imgio::kUint8, {7, 9}, {2, 1, 1}, 2.0f, 1.0f);
        auto rt = imgio::read_nifti(bytes);
        CHECK(rt.volume.data[0] == doctest::Approx(15.0));
        CHECK(rt.volume.data[1] == doctest::Approx(19.0));
    }
    {
        std::vector<unsigned char> payload(8);
        double raw = -31.25;
        std::memcpy(payload.data(), &raw, 8);
        auto bytes = build_nifti_fixture(imgio::kFloat64, payload, {1, 1, 1}, 0.0f, 0.0f);
        auto rt = imgio::read_nifti(bytes);  // slope 0 treated as 1
        CHECK(rt.volume.data[0] == doctest::Approx(-31.25));
    }
}

TEST_CASE("nifti rejects bad magic, bad datatype and truncation") {
    auto good = build_nifti_fixture(imgio::kUint8, {0}, {1, 1, 1}, 1.0f, 0.0f);
    auto bad_magic = good;
    std::memcpy(bad_magic.data() + 344, "XXXX", 4);
    CHECK_THROWS_AS(imgio::read_nifti(bad_magic), common::format_error);

    auto bad_dtype = good;
    int16_t dt = 1234;
    std::memcpy(bad_dtype.data() + 70, &dt, 2);
    CHECK_THROWS_AS(imgio::read_nifti(bad_dtype), common::format_error);

    auto truncated = good;
    truncated.resize(300);
    CHECK_THROWS_AS(imgio::read_nifti(truncated), common::io_error);

    auto short_payload = build_nifti_fixture(imgio::kFloat32, {0, 0, 0}, {1, 1, 2},
                                             1.0f, 0.0f);
    CHECK_THROWS_AS(imgio::read_nifti(short_payload), common::io_error);
}

TEST_CASE("nifti payload length is 352 + 4 bytes per voxel") {
    Volume v = volgrid::make_volume({1, 1, 1}, {1, 1, 1});
    CHECK(imgio::write_nifti(v).size() == 352 + 4);
    Volume big = volgrid::make_volume({256, 256, 35}, {1, 1, 5});
    CHECK(imgio::write_nifti(big).size() ==
          352 + static_cast<size_t>(256) * 256 * 35 * 4);
}

TEST_CASE("gzipped nifti is detected and inflated") {
    common::Rng rng(5);
    Volume v = volgrid::make_volume({3, 5, 2}, {1, 1, 1});
    for (auto& d : v.data) d = static_cast<float>(rng.uniform(0, 100));
    auto bytes = imgio::write_nifti(v);
    auto gz = imgio::gzip_compress(bytes);
    REQUIRE(imgio::is_gzip(gz));
    auto rt = imgio::read_nifti(gz);
    CHECK(rt.volume.data == v.data);

    auto corrupt = gz;
    corrupt.resize(corrupt.size() / 2);
    CHECK_THROWS_AS(imgio::read_nifti(corrupt), common::io_error);
}

TEST_CASE("nifti round-trip property over random shapes") {
    common::Rng rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        std::array<int, 3> shape{1 + static_cast<int>(rng.next_below(8)),
                                 1 + static_cast<int>(rng.next_below(8)),
                                 1 + static_cast<int>(rng.next_below(8))};
        std::array<double, 3> spacing{rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0),
                                      rng.uniform(0.5, 7.0)};
        Volume v = volgrid::make_volume(shape, spacing);
        for (auto& d : v.data) d = static_cast<float>(rng.uniform(-1024, 3000));
        auto rt = imgio::read_nifti(imgio::write_nifti(v));
        CHECK(rt.volume.data == v.data);
        CHECK(rt.volume.shape == shape);
        for (int a = 0; a < 3; ++a)
            CHECK(rt.volume.spacing[a] ==
                  doctest::Approx(static_cast<float>(spacing[a])));
    }
}

TEST_CASE("dicom meta extraction from assembled fixtures") {
    DicomBuilder b;
    b.add(0x0008, 0x0070, "LO", "SIEMENS");
    b.add(0x0008, 0x103E, "LO", "HEAD AXIAL 5MM");
    b.add(0x0018, 0x0050, "DS", "5.0");
    b.add(0x0010, 0x0040, "CS", "F");
    b.add(0x0010, 0x1010, "AS", "063Y");
    auto meta = imgio::read_dicom_meta(b.bytes);
    CHECK(meta.manufacturer == imgio::Manufacturer::Siemens);
    CHECK(meta.series_description == "HEAD AXIAL 5MM");
    CHECK(meta.slice_thickness_mm == doctest::Approx(5.0));
    CHECK(meta.patient_sex == imgio::Sex::F);
    REQUIRE(meta.patient_age_years.has_value());
    CHECK(*meta.patient_age_years == 63);
}

TEST_CASE("dicom manufacturer prefix matching") {
    DicomBuilder ge;
    ge.add(0x0008, 0x0070, "LO", "GE MEDICAL SYSTEMS");
    CHECK(imgio::read_dicom_meta(ge.bytes).manufacturer == imgio::Manufacturer::GE);

    DicomBuilder other;
    other.add(0x0008, 0x0070, "LO", "Imatron");
    CHECK(imgio::read_dicom_meta(other.bytes).manufacturer ==
          imgio::Manufacturer::Other);

    CHECK(imgio::classify_manufacturer("siemens healthineers") ==
          imgio::Manufacturer::Siemens);
    CHECK(imgio::classify_manufacturer("  ge") == imgio::Manufacturer::GE);
}

TEST_CASE("dicom skips unknown tags, including long-VR elements") {
    DicomBuilder b;
    b.add(0x0008, 0x0020, "DA", "20200101");                 // unknown short tag
    b.add_long(0x7FE0, 0x0010, "OB", {1, 2, 3, 4, 5, 6});    // pixel-ish blob
    b.add(0x0008, 0x0070, "LO", "GE");
    auto meta = imgio::read_dicom_meta(b.bytes);
    CHECK(meta.manufacturer == imgio::Manufacturer::GE);
}

TEST_CASE("dicom absent optional tags default without error") {
    DicomBuilder b;
    b.add(0x0008, 0x0070, "LO", "SIEMENS");
    auto meta = imgio::read_dicom_meta(b.bytes);
    CHECK(meta.patient_sex == imgio::Sex::Unknown);
    CHECK_FALSE(meta.patient_age_years.has_value());
    CHECK_FALSE(meta.slice_thickness_mm.has_value());
}

TEST_CASE("dicom malformed ages become absent") {
    CHECK(imgio::parse_dicom_age("063Y") == 63);
    CHECK(imgio::parse_dicom_age("7Y") == 7);
    CHECK_FALSE(imgio::parse_dicom_age("063M").has_value());
    CHECK_FALSE(imgio::parse_dicom_age("Y").has_value());
    CHECK_FALSE(imgio::parse_dicom_age("06AY").has_value());
    CHECK_FALSE(imgio::parse_dicom_age("").has_value());
}

TEST_CASE("dicom missing marker and truncations error cleanly") {
    std::vector<unsigned char> junk(200, 0);
    CHECK_THROWS_AS(imgio::read_dicom_meta(junk), common::format_error);

    DicomBuilder b;
    b.add(0x0008, 0x0070, "LO", "SIEMENS");
    b.add(0x0010, 0x1010, "AS", "063Y");
    // every prefix either parses (element boundary) or throws; never a crash
    int threw = 0;
    for (size_t len = 0; len < b.bytes.size(); ++len) {
        std::vector<unsigned char> prefix(b.bytes.begin(), b.bytes.begin() + len);
        try {
            imgio::read_dicom_meta(prefix);
            CHECK(len >= 132);
        } catch (const common::toolkit_error&) {
            ++threw;
        }
    }
    CHECK(threw > 130);  // at least all sub-preamble prefixes
}
