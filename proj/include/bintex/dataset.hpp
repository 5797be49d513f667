#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bintex/features.hpp"
#include "bintex/rng.hpp"

namespace bintex {

enum class LabelMode { main, sub };

inline std::string to_string(LabelMode m) { return m == LabelMode::main ? "main" : "sub"; }

inline LabelMode label_mode_from_string(const std::string& s) {
    if (s == "main") return LabelMode::main;
    if (s == "sub") return LabelMode::sub;
    throw std::runtime_error("unknown label mode: " + s);
}

/// Per-column (min, max) recorded when a table is normalized.
struct NormParams {
    std::vector<std::pair<double, double>> min_max;  // aligned with schema
    bool operator==(const NormParams&) const = default;
};

/// Ordered collection of FeatureRecords sharing one column schema.
struct FeatureTable {
    std::vector<std::string> schema;
    std::vector<FeatureRecord> records;
    LabelMode label_mode = LabelMode::main;
    std::optional<NormParams> norm_params;

    const std::string& label_of(const FeatureRecord& rec) const {
        return label_mode == LabelMode::main ? rec.main_class : rec.family;
    }
    const std::string& label_of(std::size_t i) const { return label_of(records[i]); }

    void add(FeatureRecord rec) {
        if (rec.names != schema)
            throw std::runtime_error("record schema mismatch for " + rec.source_id);
        if (label_of(rec).empty())
            throw std::runtime_error("record without " + to_string(label_mode) +
                                     " label: " + rec.source_id);
        records.push_back(std::move(rec));
    }

    /// Sorted unique labels for the active label mode.
    std::vector<std::string> labels() const {
        std::set<std::string> s;
        for (const auto& r : records) s.insert(label_of(r));
        return {s.begin(), s.end()};
    }

    /// New table with the given records, preserving schema, mode and params.
    FeatureTable subset(const std::vector<std::size_t>& indices) const {
        FeatureTable t;
        t.schema = schema;
        t.label_mode = label_mode;
        t.norm_params = norm_params;
        t.records.reserve(indices.size());
        for (std::size_t i : indices) t.records.push_back(records[i]);
        return t;
    }

    std::size_t size() const { return records.size(); }
};

/// family -> main_class mapping, user supplied as a two-column TSV.
using ClassMap = std::map<std::string, std::string>;

inline ClassMap load_class_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open class map: " + path.string());
    ClassMap map;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
            throw std::runtime_error("class map " + path.string() + " line " +
                                     std::to_string(lineno) +
                                     ": expected 'family<TAB>main_class'");
        map[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return map;
}

struct CorpusEntry {
    std::filesystem::path path;
    std::string family;
    std::string main_class;
};

/// One entry per regular file under a family directory, in lexicographic
/// (family, filename) order. Families missing from the class map are an error.
inline std::vector<CorpusEntry> scan_corpus(const std::filesystem::path& root,
                                            const ClassMap& class_map) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root))
        throw std::runtime_error("corpus root is not a directory: " + root.string());
    std::vector<std::string> families;
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory()) families.push_back(e.path().filename().string());
    std::sort(families.begin(), families.end());

    std::vector<std::string> unmapped;
    for (const auto& f : families)
        if (!class_map.count(f)) unmapped.push_back(f);
    if (!unmapped.empty()) {
        std::string msg = "unmapped families:";
        for (const auto& f : unmapped) msg += " " + f;
        throw std::runtime_error(msg);
    }

    std::vector<CorpusEntry> entries;
    for (const auto& fam : families) {
        std::vector<std::string> files;
        for (const auto& e : fs::directory_iterator(root / fam))
            if (e.is_regular_file()) files.push_back(e.path().filename().string());
        std::sort(files.begin(), files.end());
        for (const auto& f : files)
            entries.push_back({root / fam / f, fam, class_map.at(fam)});
    }
    if (entries.empty()) throw std::runtime_error("empty corpus");
    return entries;
}

/// 9 significant digits, '.' decimal separator. Shared by CSV and reports.
inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

namespace detail {

inline void check_label_csv_safe(const std::string& s, const std::string& what) {
    if (s.find_first_of(",\r\n\"") != std::string::npos)
        throw std::runtime_error(what + " contains characters not representable in CSV: " + s);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace detail

/// Header is source_id, family, main_class, then the schema columns. Values
/// carry 9 significant digits; LF line endings, no quoting.
inline void write_csv(const FeatureTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write CSV: " + path.string());
    out << "source_id,family,main_class";
    for (const auto& name : table.schema) {
        detail::check_label_csv_safe(name, "feature name");
        out << ',' << name;
    }
    out << '\n';
    for (const auto& rec : table.records) {
        detail::check_label_csv_safe(rec.source_id, "source_id");
        detail::check_label_csv_safe(rec.family, "family");
        detail::check_label_csv_safe(rec.main_class, "main_class");
        out << rec.source_id << ',' << rec.family << ',' << rec.main_class;
        for (double v : rec.values) out << ',' << format_value(v);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failure: " + path.string());
}

inline FeatureTable read_csv(const std::filesystem::path& path,
                             LabelMode mode = LabelMode::main) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open CSV: " + path.string());
    auto fail = [&](int row, const std::string& what) {
        throw std::runtime_error("CSV parse error at " + path.string() + " row " +
                                 std::to_string(row) + ": " + what);
    };

    std::string line;
    if (!std::getline(in, line)) fail(1, "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = detail::split_csv_line(line);
    if (header.size() < 4 || header[0] != "source_id" || header[1] != "family" ||
        header[2] != "main_class")
        fail(1, "header must start with source_id,family,main_class and one feature column");

    FeatureTable table;
    table.label_mode = mode;
    table.schema.assign(header.begin() + 3, header.end());

    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            fail(row, "expected " + std::to_string(header.size()) + " columns, got " +
                          std::to_string(cells.size()));
        FeatureRecord rec;
        rec.source_id = cells[0];
        rec.family = cells[1];
        rec.main_class = cells[2];
        rec.names = table.schema;
        rec.values.reserve(table.schema.size());
        for (std::size_t i = 3; i < cells.size(); ++i) {
            try {
                std::size_t used = 0;
                double v = std::stod(cells[i], &used);
                if (used != cells[i].size()) throw std::invalid_argument(cells[i]);
                rec.values.push_back(v);
            } catch (const std::exception&) {
                fail(row, "non-numeric value '" + cells[i] + "' in column " + header[i]);
            }
        }
        table.add(std::move(rec));
    }
    return table;
}

/// Per-column min/max over the given table.
inline NormParams fit_normalization(const FeatureTable& table) {
    if (table.records.empty()) throw std::runtime_error("cannot fit normalization on empty table");
    NormParams p;
    p.min_max.resize(table.schema.size());
    for (std::size_t c = 0; c < table.schema.size(); ++c) {
        double lo = table.records[0].values[c], hi = lo;
        for (const auto& rec : table.records) {
            lo = std::min(lo, rec.values[c]);
            hi = std::max(hi, rec.values[c]);
        }
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw std::runtime_error("non-finite values in column " + table.schema[c]);
        p.min_max[c] = {lo, hi};
    }
    return p;
}

/// x' = (x - min)/(max - min), clamped to [0,1]; a constant column maps to
/// 0.5 everywhere. The params are recorded on the result.
inline FeatureTable apply_normalization(const FeatureTable& table, const NormParams& params) {
    if (params.min_max.size() != table.schema.size())
        throw std::runtime_error("normalization params do not match schema");
    FeatureTable out = table;
    for (auto& rec : out.records)
        for (std::size_t c = 0; c < rec.values.size(); ++c) {
            auto [lo, hi] = params.min_max[c];
            if (hi == lo) {
                rec.values[c] = 0.5;
            } else {
                double v = (rec.values[c] - lo) / (hi - lo);
                rec.values[c] = std::clamp(v, 0.0, 1.0);
            }
        }
    out.norm_params = params;
    return out;
}

inline FeatureTable normalize(const FeatureTable& table) {
    return apply_normalization(table, fit_normalization(table));
}

namespace detail {

inline std::map<std::string, std::vector<std::size_t>> by_class(const FeatureTable& t) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < t.records.size(); ++i) groups[t.label_of(i)].push_back(i);
    return groups;
}

} // namespace detail

/// Per-class test count is round-half-up of class_size * test_fraction, at
/// least 1 and at most class_size - 1. Record order of the input is kept on
/// both sides.
inline std::pair<FeatureTable, FeatureTable>
stratified_split(const FeatureTable& table, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("test fraction must be in (0,1)");
    auto groups = detail::by_class(table);
    for (const auto& [label, idx] : groups)
        if (idx.size() < 2)
            throw std::runtime_error("class " + label + " has fewer than 2 records");

    Rng rng(seed);
    std::vector<char> in_test(table.records.size(), 0);
    for (auto& [label, idx] : groups) {
        std::vector<std::size_t> shuffled = idx;
        rng.shuffle(shuffled);
        std::size_t n = shuffled.size();
        auto k = static_cast<std::size_t>(std::floor(n * test_fraction + 0.5));
        k = std::clamp<std::size_t>(k, 1, n - 1);
        for (std::size_t i = 0; i < k; ++i) in_test[shuffled[i]] = 1;
    }
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < table.records.size(); ++i)
        (in_test[i] ? test_idx : train_idx).push_back(i);
    return {table.subset(train_idx), table.subset(test_idx)};
}

/// Stratified k-fold partition: per class, fold sizes differ by at most one,
/// and each record appears in exactly one validation fold.
inline std::vector<std::pair<FeatureTable, FeatureTable>>
kfold(const FeatureTable& table, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("k must be >= 2");
    auto groups = detail::by_class(table);
    for (const auto& [label, idx] : groups)
        if (idx.size() < static_cast<std::size_t>(k))
            throw std::runtime_error("class " + label + " has " + std::to_string(idx.size()) +
                                     " records, fewer than k=" + std::to_string(k));

    Rng rng(seed);
    std::vector<int> fold_of(table.records.size(), 0);
    for (auto& [label, idx] : groups) {
        std::vector<std::size_t> shuffled = idx;
        rng.shuffle(shuffled);
        for (std::size_t i = 0; i < shuffled.size(); ++i)
            fold_of[shuffled[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
    std::vector<std::pair<FeatureTable, FeatureTable>> folds;
    folds.reserve(k);
    for (int f = 0; f < k; ++f) {
        std::vector<std::size_t> train_idx, val_idx;
        for (std::size_t i = 0; i < table.records.size(); ++i)
            (fold_of[i] == f ? val_idx : train_idx).push_back(i);
        folds.emplace_back(table.subset(train_idx), table.subset(val_idx));
    }
    return folds;
}

inline std::vector<std::string> engineered_schema(const std::vector<std::string>& schema,
                                                  const std::vector<Transform>& transforms) {
    std::vector<std::string> out = schema;
    static constexpr Transform kOrder[] = {Transform::log, Transform::square, Transform::cube};
    for (const auto& name : schema)
        for (Transform t : kOrder)
            for (Transform u : transforms)
                if (u == t) {
                    out.push_back(name + transform_suffix(t));
                    break;
                }
    return out;
}

/// Applies engineer_features to every record and extends the schema.
inline FeatureTable engineer_table(const FeatureTable& table,
                                   const std::vector<Transform>& transforms) {
    FeatureTable out;
    out.label_mode = table.label_mode;
    out.schema = engineered_schema(table.schema, transforms);
    for (const auto& rec : table.records)
        out.add(engineer_features(rec, transforms));
    return out;
}

} // namespace bintex
