#include "imgio/dicom.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>

#include "common/error.hpp"

namespace imgio {

std::string manufacturer_name(Manufacturer m) {
    switch (m) {
        case Manufacturer::GE: return "GE";
        case Manufacturer::Siemens: return "Siemens";
        default: return "Other";
    }
}

Manufacturer manufacturer_from_string(const std::string& s) {
    if (s == "GE") return Manufacturer::GE;
    if (s == "Siemens") return Manufacturer::Siemens;
    return Manufacturer::Other;
}

std::string sex_name(Sex s) {
    switch (s) {
        case Sex::M: return "M";
        case Sex::F: return "F";
        default: return "U";
    }
}

Sex sex_from_string(const std::string& s) {
    if (s == "M") return Sex::M;
    if (s == "F") return Sex::F;
    return Sex::Unknown;
}

Manufacturer classify_manufacturer(const std::string& raw) {
    std::string up;
    up.reserve(raw.size());
    for (char c : raw) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    // trim leading spaces before the prefix match
    size_t start = up.find_first_not_of(' ');
    if (start == std::string::npos) return Manufacturer::Other;
    up = up.substr(start);
    if (up.rfind("GE", 0) == 0) return Manufacturer::GE;
    if (up.rfind("SIEMENS", 0) == 0) return Manufacturer::Siemens;
    return Manufacturer::Other;
}

std::optional<int> parse_dicom_age(const std::string& as) {
    // AS format: nnnD/W/M/Y. Only whole years are kept.
    std::string s = as;
    while (!s.empty() && s.back() == ' ') s.pop_back();
    if (s.size() < 2) return std::nullopt;
    char unit = s.back();
    if (unit != 'Y' && unit != 'y') return std::nullopt;
    std::string digits = s.substr(0, s.size() - 1);
    if (digits.empty() || digits.size() > 3) return std::nullopt;
    for (char c : digits)
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    return std::stoi(digits);
}

namespace {

struct Cursor {
    const unsigned char* p;
    size_t n;
    size_t pos = 0;

    bool eof() const { return pos >= n; }
    size_t remaining() const { return n - pos; }
    const unsigned char* take(size_t k) {
        if (remaining() < k)
            throw common::io_error("dicom: truncated element at offset " +
                                   std::to_string(pos));
        const unsigned char* q = p + pos;
        pos += k;
        return q;
    }
    uint16_t u16() {
        const unsigned char* q = take(2);
        return static_cast<uint16_t>(q[0] | (q[1] << 8));
    }
    uint32_t u32() {
        const unsigned char* q = take(4);
        return static_cast<uint32_t>(q[0] | (q[1] << 8) | (q[2] << 16) |
                                     (static_cast<uint32_t>(q[3]) << 24));
    }
};

bool is_long_vr(const char vr[2]) {
    static const char* long_vrs[] = {"OB", "OW", "OF", "SQ", "UT", "UN"};
    for (const char* v : long_vrs)
        if (vr[0] == v[0] && vr[1] == v[1]) return true;
    return false;
}

std::string trim_value(const unsigned char* p, size_t n) {
    // string values are space/NUL padded to even length
    while (n > 0 && (p[n - 1] == ' ' || p[n - 1] == '\0')) --n;
    size_t s = 0;
    while (s < n && p[s] == ' ') ++s;
    return std::string(reinterpret_cast<const char*>(p + s), n - s);
}

}  // namespace

SeriesMeta read_dicom_meta(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 132 || std::memcmp(bytes.data() + 128, "DICM", 4) != 0)
        throw common::format_error("dicom: missing DICM marker at offset 128");

    Cursor cur{bytes.data(), bytes.size(), 132};
    SeriesMeta meta;
    bool have_manufacturer = false;

    while (!cur.eof()) {
        if (cur.remaining() < 8)
            throw common::io_error("dicom: truncated element header at offset " +
                                   std::to_string(cur.pos));
        const uint16_t group = cur.u16();
        const uint16_t elem = cur.u16();
        char vr[2];
        std::memcpy(vr, cur.take(2), 2);
        uint32_t len;
        if (is_long_vr(vr)) {
            cur.take(2);  // reserved
            len = cur.u32();
            if (len == 0xFFFFFFFFu)
                throw common::format_error("dicom: undefined-length elements unsupported");
        } else {
            len = cur.u16();
        }
        const unsigned char* val = cur.take(len);

        const uint32_t tag = (static_cast<uint32_t>(group) << 16) | elem;
        switch (tag) {
            case 0x00080070: {  // Manufacturer, LO
                meta.manufacturer_raw = trim_value(val, len);
                meta.manufacturer = classify_manufacturer(meta.manufacturer_raw);
                have_manufacturer = !meta.manufacturer_raw.empty();
                break;
            }
            case 0x0008103E:  // SeriesDescription, LO
                meta.series_description = trim_value(val, len);
                break;
            case 0x00180050: {  // SliceThickness, DS
                std::string s = trim_value(val, len);
                try {
                    size_t used = 0;
                    double v = std::stod(s, &used);
                    if (used == s.size() && v > 0) meta.slice_thickness_mm = v;
                } catch (...) {
                    // malformed DS left absent
                }
                break;
            }
            case 0x00100040: {  // PatientSex, CS
                std::string s = trim_value(val, len);
                if (s == "M") meta.patient_sex = Sex::M;
                else if (s == "F") meta.patient_sex = Sex::F;
                else meta.patient_sex = Sex::Unknown;
                break;
            }
            case 0x00101010:  // PatientAge, AS
                meta.patient_age_years = parse_dicom_age(trim_value(val, len));
                break;
            default:
                break;  // skipped by length
        }
    }
    if (!have_manufacturer) {
        meta.manufacturer = Manufacturer::Other;
        meta.manufacturer_raw = "";
    }
    return meta;
}

}  // namespace imgio
