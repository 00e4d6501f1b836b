#pragma once

#include <optional>
#include <string>
#include <vector>

namespace imgio {

enum class Manufacturer { GE, Siemens, Other };
enum class Sex { M, F, Unknown };

std::string manufacturer_name(Manufacturer m);
Manufacturer manufacturer_from_string(const std::string& s);
std::string sex_name(Sex s);
Sex sex_from_string(const std::string& s);

// Per-study acquisition metadata driving cohort stratification.
struct SeriesMeta {
    std::string study_id;
    Manufacturer manufacturer = Manufacturer::Other;
    std::string manufacturer_raw;  // original vendor string, e.g. "GE MEDICAL SYSTEMS"
    std::string series_description;
    std::optional<double> slice_thickness_mm;
    std::optional<int> patient_age_years;
    Sex patient_sex = Sex::Unknown;
    std::optional<int> label;  // 1 positive, 0 negative
};

// Extracts Manufacturer (0008,0070), SeriesDescription (0008,103E),
// SliceThickness (0018,0050), PatientSex (0010,0040) and PatientAge
// (0010,1010) from a DICOM Part-10 explicit-VR little-endian payload.
// Unknown tags are skipped by length; pixel data is never decoded.
SeriesMeta read_dicom_meta(const std::vector<unsigned char>& bytes);

// Maps a vendor string to the enum by case-insensitive prefix
// ("GE...", "SIEMENS...") with everything else classified Other.
Manufacturer classify_manufacturer(const std::string& raw);

// DICOM AS values like "063Y" parse to 63; malformed ages come back empty.
std::optional<int> parse_dicom_age(const std::string& as);

}  // namespace imgio
