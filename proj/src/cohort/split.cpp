#include "cohort/split.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"

namespace cohort {

std::string split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        default: return "test";
    }
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "val") return Split::Val;
    if (s == "test") return Split::Test;
    throw common::format_error("unknown split tag: " + s);
}

std::string cell_key(const Cell& c) {
    return imgio::manufacturer_name(c.manufacturer) + "/" +
           (c.label ? "positive" : "negative");
}

Cell cell_of(const CatalogEntry& e) {
    return Cell{e.meta.manufacturer, e.meta.label.value_or(0)};
}

int SplitQuota::at(Split s, const Cell& c) const {
    auto it = counts.find({s, c});
    return it == counts.end() ? 0 : it->second;
}

int SplitQuota::split_total(Split s) const {
    int t = 0;
    for (const auto& [k, v] : counts)
        if (k.first == s) t += v;
    return t;
}

int SplitQuota::total() const {
    int t = 0;
    for (const auto& [k, v] : counts) t += v;
    return t;
}

SplitQuota table1_quota() {
    using M = imgio::Manufacturer;
    SplitQuota q;
    for (M m : {M::GE, M::Siemens}) {
        q.counts[{Split::Train, Cell{m, 1}}] = 138;
        q.counts[{Split::Train, Cell{m, 0}}] = 138;
        q.counts[{Split::Val, Cell{m, 1}}] = 17;
        q.counts[{Split::Val, Cell{m, 0}}] = 17;
        q.counts[{Split::Test, Cell{m, 1}}] = 40;
        q.counts[{Split::Test, Cell{m, 0}}] = 41;
    }
    return q;
}

SplitQuota quota_from_fractions(const Catalog& catalog, double train_frac,
                                double val_frac, double test_frac) {
    const double sum = train_frac + val_frac + test_frac;
    if (std::abs(sum - 1.0) > 1e-9)
        throw common::validation_error("split fractions must sum to 1");
    if (train_frac < 0 || val_frac < 0 || test_frac < 0)
        throw common::validation_error("split fractions must be nonnegative");

    std::map<Cell, int> cell_sizes;
    for (const auto& e : catalog.entries) cell_sizes[cell_of(e)]++;

    SplitQuota q;
    const std::array<std::pair<Split, double>, 3> fracs = {
        {{Split::Train, train_frac}, {Split::Val, val_frac}, {Split::Test, test_frac}}};
    for (const auto& [cell, n] : cell_sizes) {
        // largest-remainder rounding within the cell
        std::array<int, 3> base;
        std::array<double, 3> rem;
        int assigned = 0;
        for (int i = 0; i < 3; ++i) {
            double exact = fracs[i].second * n;
            base[i] = static_cast<int>(std::floor(exact));
            rem[i] = exact - base[i];
            assigned += base[i];
        }
        int leftover = n - assigned;
        std::array<int, 3> order = {0, 1, 2};
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return rem[a] > rem[b]; });
        for (int i = 0; i < leftover; ++i) base[order[i]]++;
        for (int i = 0; i < 3; ++i) q.counts[{fracs[i].first, cell}] = base[i];
    }
    return q;
}

SplitAssignment make_split(const Catalog& catalog, const SplitQuota& quota,
                           uint64_t seed) {
    // group study ids per cell, sorted so catalog order is irrelevant
    std::map<Cell, std::vector<std::string>> members;
    for (const auto& e : catalog.entries) members[cell_of(e)].push_back(e.study_id);
    for (auto& [cell, ids] : members) std::sort(ids.begin(), ids.end());

    // feasibility: per-cell quota totals must match per-cell catalog counts
    std::string infeasible;
    std::map<Cell, int> quota_cells;
    for (const auto& [k, v] : quota.counts) {
        if (v < 0)
            throw common::validation_error("split quota has a negative count for " +
                                           cell_key(k.second));
        quota_cells[k.second] += v;
    }
    for (const auto& [cell, total] : quota_cells) {
        const int have = members.count(cell) ? static_cast<int>(members[cell].size()) : 0;
        if (have != total)
            infeasible += "  " + cell_key(cell) + ": quota " + std::to_string(total) +
                          ", catalog " + std::to_string(have) + "\n";
    }
    for (const auto& [cell, ids] : members)
        if (!quota_cells.count(cell))
            infeasible += "  " + cell_key(cell) + ": quota 0, catalog " +
                          std::to_string(ids.size()) + "\n";
    if (!infeasible.empty())
        throw common::validation_error("split quota infeasible for cells:\n" + infeasible);

    SplitAssignment a;
    a.seed = seed;
    for (auto& [cell, ids] : members) {
        common::Rng rng(common::derive_seed(seed, "split-cell/" + cell_key(cell)));
        rng.shuffle(ids);
        size_t i = 0;
        for (Split s : {Split::Train, Split::Val, Split::Test}) {
            const int k = quota.at(s, cell);
            for (int j = 0; j < k; ++j) a.split_of[ids[i++]] = s;
        }
    }
    return a;
}

BalanceReport verify_balance(const SplitAssignment& assignment, const Catalog& catalog,
                             const SplitQuota& quota) {
    for (const auto& e : catalog.entries)
        if (!assignment.split_of.count(e.study_id))
            throw common::validation_error("assignment does not cover study " +
                                           e.study_id);

    std::map<std::pair<Split, Cell>, int> realized;
    for (const auto& e : catalog.entries)
        realized[{assignment.split_of.at(e.study_id), cell_of(e)}]++;

    std::set<std::pair<Split, Cell>> keys;
    for (const auto& [k, v] : realized) keys.insert(k);
    for (const auto& [k, v] : quota.counts) keys.insert(k);

    BalanceReport rep;
    for (const auto& k : keys) {
        BalanceCell bc;
        bc.split = k.first;
        bc.cell = k.second;
        bc.realized = realized.count(k) ? realized.at(k) : 0;
        bc.quota = quota.at(k.first, k.second);
        bc.flagged = bc.realized != bc.quota;
        if (bc.flagged) rep.flag_count++;
        rep.cells.push_back(bc);
    }

    std::map<imgio::Manufacturer, std::vector<const CatalogEntry*>> groups;
    for (const auto& e : catalog.entries) groups[e.meta.manufacturer].push_back(&e);
    for (const auto& [m, es] : groups) {
        GroupDemographics d;
        d.manufacturer = m;
        d.n = static_cast<int>(es.size());
        std::vector<double> ages;
        int male = 0, female = 0;
        for (const auto* e : es) {
            if (e->meta.patient_age_years) ages.push_back(*e->meta.patient_age_years);
            if (e->meta.patient_sex == imgio::Sex::M) male++;
            if (e->meta.patient_sex == imgio::Sex::F) female++;
        }
        if (!ages.empty()) {
            double mean = 0;
            for (double a : ages) mean += a;
            mean /= ages.size();
            double var = 0;
            for (double a : ages) var += (a - mean) * (a - mean);
            d.age_mean = mean;
            d.age_sd = ages.size() > 1 ? std::sqrt(var / (ages.size() - 1)) : 0.0;
        }
        d.frac_male = d.n ? static_cast<double>(male) / d.n : 0.0;
        d.frac_female = d.n ? static_cast<double>(female) / d.n : 0.0;
        rep.demographics.push_back(d);
    }
    return rep;
}

std::string split_to_csv(const SplitAssignment& a) {
    std::string out = "study_id,split\n";
    for (const auto& [id, s] : a.split_of)
        out += common::csv_join({id, split_name(s)}) + "\n";
    return out;
}

SplitAssignment split_from_csv(const std::string& text) {
    auto rows = common::csv_parse(text);
    if (rows.empty() || rows[0] != std::vector<std::string>{"study_id", "split"})
        throw common::format_error("split csv: unexpected header");
    SplitAssignment a;
    for (size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 2)
            throw common::format_error("split csv: bad row " + std::to_string(r + 1));
        a.split_of[rows[r][0]] = split_from_string(rows[r][1]);
    }
    return a;
}

}  // namespace cohort
