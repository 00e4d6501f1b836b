#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cohort/catalog.hpp"

namespace cohort {

enum class Split { Train, Val, Test };

std::string split_name(Split s);
Split split_from_string(const std::string& s);

// A stratification cell: (manufacturer, label).
struct Cell {
    imgio::Manufacturer manufacturer;
    int label;  // 0/1; studies without a label fall in label 0

    auto operator<=>(const Cell&) const = default;
};

std::string cell_key(const Cell& c);

// Per-(split, cell) target counts.
struct SplitQuota {
    std::map<std::pair<Split, Cell>, int> counts;

    int at(Split s, const Cell& c) const;
    int split_total(Split s) const;
    int total() const;
};

// The cohort counts reproduced as a named preset: 552/68/162 studies over
// two manufacturers with a positive/negative label each.
SplitQuota table1_quota();

// Derives per-cell quotas from train/val/test fractions by largest-remainder
// rounding within each cell.
SplitQuota quota_from_fractions(const Catalog& catalog, double train_frac,
                                double val_frac, double test_frac);

struct SplitAssignment {
    std::map<std::string, Split> split_of;  // study_id -> split
    uint64_t seed = 0;
};

// Deterministic balanced split: within each (manufacturer, label) cell the
// partition is a uniformly random function of (seed, cell) alone, so the
// result is invariant to catalog entry order and to adding other cells.
SplitAssignment make_split(const Catalog& catalog, const SplitQuota& quota,
                           uint64_t seed);

struct BalanceCell {
    Split split;
    Cell cell;
    int realized = 0;
    int quota = 0;
    bool flagged = false;
};

struct GroupDemographics {
    imgio::Manufacturer manufacturer;
    int n = 0;
    double age_mean = 0.0;
    double age_sd = 0.0;
    double frac_male = 0.0;
    double frac_female = 0.0;
};

struct BalanceReport {
    std::vector<BalanceCell> cells;
    std::vector<GroupDemographics> demographics;
    int flag_count = 0;
};

BalanceReport verify_balance(const SplitAssignment& assignment, const Catalog& catalog,
                             const SplitQuota& quota);

// CSV (study_id, split).
std::string split_to_csv(const SplitAssignment& a);
SplitAssignment split_from_csv(const std::string& text);

Cell cell_of(const CatalogEntry& e);

}  // namespace cohort
