#include "cohort/catalog.hpp"

#include <set>

#include "common/csv.hpp"
#include "common/error.hpp"

namespace cohort {

const CatalogEntry* Catalog::find(const std::string& study_id) const {
    for (const auto& e : entries)
        if (e.study_id == study_id) return &e;
    return nullptr;
}

Catalog build_catalog(std::vector<CatalogEntry> entries) {
    if (entries.empty())
        throw common::validation_error("catalog: no entries");
    std::set<std::string> seen;
    for (const auto& e : entries) {
        if (e.study_id.empty())
            throw common::validation_error("catalog: empty study_id");
        if (!seen.insert(e.study_id).second)
            throw common::validation_error("catalog: duplicate study_id " + e.study_id);
        if (e.meta.manufacturer_raw.empty() &&
            e.meta.manufacturer == imgio::Manufacturer::Other)
            throw common::validation_error("catalog: missing manufacturer for " +
                                           e.study_id);
    }
    Catalog c;
    c.entries = std::move(entries);
    return c;
}

std::string catalog_to_csv(const Catalog& catalog) {
    std::string out =
        "study_id,path,manufacturer,series_description,slice_thickness_mm,age,sex,label\n";
    for (const auto& e : catalog.entries) {
        std::vector<std::string> f;
        f.push_back(e.study_id);
        f.push_back(e.path);
        f.push_back(imgio::manufacturer_name(e.meta.manufacturer));
        f.push_back(e.meta.series_description);
        f.push_back(e.meta.slice_thickness_mm
                        ? common::format_double(*e.meta.slice_thickness_mm, 3)
                        : "");
        f.push_back(e.meta.patient_age_years ? std::to_string(*e.meta.patient_age_years)
                                             : "");
        f.push_back(imgio::sex_name(e.meta.patient_sex));
        f.push_back(e.meta.label ? std::to_string(*e.meta.label) : "");
        out += common::csv_join(f);
        out += '\n';
    }
    return out;
}

Catalog catalog_from_csv(const std::string& text) {
    auto rows = common::csv_parse(text);
    if (rows.empty())
        throw common::format_error("catalog csv: empty file");
    const std::vector<std::string> header = {
        "study_id", "path", "manufacturer", "series_description",
        "slice_thickness_mm", "age", "sex", "label"};
    if (rows[0] != header)
        throw common::format_error("catalog csv: unexpected header");
    std::vector<CatalogEntry> entries;
    for (size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size())
            throw common::format_error("catalog csv: row " + std::to_string(r + 1) +
                                       " has " + std::to_string(row.size()) + " fields");
        CatalogEntry e;
        e.study_id = row[0];
        e.path = row[1];
        e.meta.study_id = row[0];
        e.meta.manufacturer = imgio::manufacturer_from_string(row[2]);
        e.meta.manufacturer_raw = row[2];
        e.meta.series_description = row[3];
        if (!row[4].empty()) e.meta.slice_thickness_mm = std::stod(row[4]);
        if (!row[5].empty()) e.meta.patient_age_years = std::stoi(row[5]);
        e.meta.patient_sex = imgio::sex_from_string(row[6]);
        if (!row[7].empty()) e.meta.label = std::stoi(row[7]);
        entries.push_back(std::move(e));
    }
    return build_catalog(std::move(entries));
}

Catalog load_catalog(const std::string& path) {
    return catalog_from_csv(common::read_text_file(path));
}

void save_catalog(const std::string& path, const Catalog& catalog) {
    common::write_text_file(path, catalog_to_csv(catalog));
}

}  // namespace cohort
