#pragma once

#include <string>
#include <vector>

#include "imgio/dicom.hpp"

namespace cohort {

struct CatalogEntry {
    std::string study_id;
    std::string path;  // volume locator
    imgio::SeriesMeta meta;
};

// Immutable study catalog with unique ids.
struct Catalog {
    std::vector<CatalogEntry> entries;

    size_t size() const { return entries.size(); }
    const CatalogEntry* find(const std::string& study_id) const;
};

// Validates and builds a catalog: duplicate study ids and entries with a
// missing manufacturer string are rejected.
Catalog build_catalog(std::vector<CatalogEntry> entries);

// CSV with header
//   study_id,path,manufacturer,series_description,slice_thickness_mm,age,sex,label
// Absent optionals serialize to empty fields.
std::string catalog_to_csv(const Catalog& catalog);
Catalog catalog_from_csv(const std::string& text);
Catalog load_catalog(const std::string& path);
void save_catalog(const std::string& path, const Catalog& catalog);

}  // namespace cohort
