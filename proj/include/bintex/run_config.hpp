#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bintex/dataset.hpp"
#include "bintex/features.hpp"
#include "bintex/model.hpp"

namespace bintex {

/// Where min-max parameters are fitted: the whole table before splitting
/// (the default), the training rows only, or not at all.
enum class NormScope { none, train, whole };

inline std::string to_string(NormScope s) {
    switch (s) {
        case NormScope::none: return "none";
        case NormScope::train: return "train";
        case NormScope::whole: return "whole";
    }
    return "?";
}

inline NormScope norm_scope_from_string(const std::string& s) {
    if (s == "none") return NormScope::none;
    if (s == "train") return NormScope::train;
    if (s == "whole") return NormScope::whole;
    throw std::runtime_error("unknown normalization scope: " + s);
}

struct RunConfig {
    std::filesystem::path corpus;
    std::filesystem::path class_map;
    std::filesystem::path output_dir;
    LabelMode label_mode = LabelMode::main;
    std::uint64_t seed = 0;

    ExtractionConfig extraction;

    NormScope norm_scope = NormScope::whole;
    double test_fraction = 0.2;
    int k = 2;

    std::vector<ModelKind> models = {ModelKind::naive_bayes, ModelKind::logistic,
                                     ModelKind::forest};
    LogisticHyper logistic;
    ForestHyper forest;

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string shortest_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline double config_double(const std::string& key, const std::string& v) {
    double d = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), d);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw std::runtime_error("run config: bad number for " + key + ": '" + v + "'");
    return d;
}

inline std::int64_t config_int(const std::string& key, const std::string& v) {
    std::int64_t i = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), i);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw std::runtime_error("run config: bad integer for " + key + ": '" + v + "'");
    return i;
}

inline std::uint64_t config_u64(const std::string& key, const std::string& v) {
    std::uint64_t i = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), i);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw std::runtime_error("run config: bad unsigned integer for " + key + ": '" + v + "'");
    return i;
}

inline bool config_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw std::runtime_error("run config: bad boolean for " + key + ": '" + v + "'");
}

} // namespace detail

/// Sectioned key-value text form. Doubles use shortest round-trip notation,
/// so parse(render(c)) == c exactly.
inline std::string render_run_config(const RunConfig& c) {
    using detail::shortest_double;
    std::string out;
    out += "[run]\n";
    out += "corpus = " + c.corpus.string() + "\n";
    out += "class_map = " + c.class_map.string() + "\n";
    out += "output_dir = " + c.output_dir.string() + "\n";
    out += "label_mode = " + to_string(c.label_mode) + "\n";
    out += "seed = " + std::to_string(c.seed) + "\n";
    out += "\n[extract]\n";
    out += "levels = " + std::to_string(c.extraction.glcm_levels) + "\n";
    out += "offsets =";
    for (const auto& o : c.extraction.glcm_offsets)
        out += " " + std::to_string(o.drow) + ":" + std::to_string(o.dcol);
    out += "\n";
    out += "symmetric = " + std::string(c.extraction.glcm_symmetric ? "true" : "false") + "\n";
    out += "offset_mode = " + to_string(c.extraction.glcm_offset_mode) + "\n";
    out += "gabor_frequencies =";
    for (double f : c.extraction.gabor_frequencies) out += " " + shortest_double(f);
    out += "\n";
    out += "gabor_orientations =";
    for (double t : c.extraction.gabor_orientations) out += " " + shortest_double(t);
    out += "\n";
    out += "gabor_sigma_factor = " + shortest_double(c.extraction.gabor_sigma_factor) + "\n";
    out += "transforms =";
    for (Transform t : c.extraction.transforms) out += " " + to_string(t);
    out += "\n";
    out += "\n[normalize]\n";
    out += "scope = " + to_string(c.norm_scope) + "\n";
    out += "\n[split]\n";
    out += "test_fraction = " + shortest_double(c.test_fraction) + "\n";
    out += "k = " + std::to_string(c.k) + "\n";
    out += "\n[model]\n";
    out += "kinds =";
    for (ModelKind m : c.models) out += " " + to_string(m);
    out += "\n";
    out += "learning_rate = " + shortest_double(c.logistic.learning_rate) + "\n";
    out += "epochs = " + std::to_string(c.logistic.epochs) + "\n";
    out += "l2 = " + shortest_double(c.logistic.l2) + "\n";
    out += "n_trees = " + std::to_string(c.forest.n_trees) + "\n";
    out += "max_features = " + std::to_string(c.forest.max_features) + "\n";
    out += "min_samples_split = " + std::to_string(c.forest.min_samples_split) + "\n";
    return out;
}

inline RunConfig parse_run_config(const std::string& text) {
    using namespace detail;
    RunConfig c;
    c.extraction.glcm_offsets.clear();
    c.extraction.gabor_frequencies.clear();
    c.extraction.gabor_orientations.clear();
    c.extraction.transforms.clear();
    c.models.clear();
    bool seed_seen = false;

    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto fail = [&](const std::string& msg) {
            throw std::runtime_error("run config line " + std::to_string(lineno) + ": " + msg);
        };
        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header");
            section = line.substr(1, line.size() - 2);
            if (section != "run" && section != "extract" && section != "normalize" &&
                section != "split" && section != "model")
                fail("unknown section [" + section + "]");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (section.empty()) fail("key before any section");
        std::string qual = section + "." + key;

        if (qual == "run.corpus") {
            c.corpus = value;
        } else if (qual == "run.class_map") {
            c.class_map = value;
        } else if (qual == "run.output_dir") {
            c.output_dir = value;
        } else if (qual == "run.label_mode") {
            c.label_mode = label_mode_from_string(value);
        } else if (qual == "run.seed") {
            c.seed = config_u64(qual, value);
            seed_seen = true;
        } else if (qual == "extract.levels") {
            c.extraction.glcm_levels = static_cast<int>(config_int(qual, value));
        } else if (qual == "extract.offsets") {
            for (const auto& tok : split_ws(value)) {
                auto colon = tok.find(':');
                if (colon == std::string::npos) fail("offset must be drow:dcol, got '" + tok + "'");
                GlcmOffset o;
                o.drow = static_cast<int>(config_int(qual, tok.substr(0, colon)));
                o.dcol = static_cast<int>(config_int(qual, tok.substr(colon + 1)));
                c.extraction.glcm_offsets.push_back(o);
            }
        } else if (qual == "extract.symmetric") {
            c.extraction.glcm_symmetric = config_bool(qual, value);
        } else if (qual == "extract.offset_mode") {
            c.extraction.glcm_offset_mode = glcm_offset_mode_from_string(value);
        } else if (qual == "extract.gabor_frequencies") {
            for (const auto& tok : split_ws(value))
                c.extraction.gabor_frequencies.push_back(config_double(qual, tok));
        } else if (qual == "extract.gabor_orientations") {
            for (const auto& tok : split_ws(value))
                c.extraction.gabor_orientations.push_back(config_double(qual, tok));
        } else if (qual == "extract.gabor_sigma_factor") {
            c.extraction.gabor_sigma_factor = config_double(qual, value);
        } else if (qual == "extract.transforms") {
            for (const auto& tok : split_ws(value))
                c.extraction.transforms.push_back(transform_from_string(tok));
        } else if (qual == "normalize.scope") {
            c.norm_scope = norm_scope_from_string(value);
        } else if (qual == "split.test_fraction") {
            c.test_fraction = config_double(qual, value);
        } else if (qual == "split.k") {
            c.k = static_cast<int>(config_int(qual, value));
        } else if (qual == "model.kinds") {
            for (const auto& tok : split_ws(value)) c.models.push_back(model_kind_from_string(tok));
        } else if (qual == "model.learning_rate") {
            c.logistic.learning_rate = config_double(qual, value);
        } else if (qual == "model.epochs") {
            c.logistic.epochs = static_cast<int>(config_int(qual, value));
        } else if (qual == "model.l2") {
            c.logistic.l2 = config_double(qual, value);
        } else if (qual == "model.n_trees") {
            c.forest.n_trees = static_cast<int>(config_int(qual, value));
        } else if (qual == "model.max_features") {
            c.forest.max_features = static_cast<int>(config_int(qual, value));
        } else if (qual == "model.min_samples_split") {
            c.forest.min_samples_split = static_cast<int>(config_int(qual, value));
        } else {
            fail("unknown key " + qual);
        }
    }
    if (!seed_seen) throw std::runtime_error("run config: missing required key run.seed");
    return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open run config: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

inline void save_run_config(const RunConfig& c, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write run config: " + path.string());
    out << render_run_config(c);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Checks referenced inputs exist and numeric settings are usable before any
/// work starts.
inline void validate_run_config(const RunConfig& c) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(c.corpus))
        throw std::runtime_error("corpus root is not a directory: " + c.corpus.string());
    if (!fs::is_regular_file(c.class_map))
        throw std::runtime_error("class map not found: " + c.class_map.string());
    if (c.output_dir.empty()) throw std::runtime_error("output_dir must be set");
    if (c.extraction.glcm_levels < 2 || c.extraction.glcm_levels > 256)
        throw std::runtime_error("levels out of range [2,256]");
    if (c.extraction.glcm_offsets.empty()) throw std::runtime_error("no GLCM offsets configured");
    if (c.extraction.gabor_frequencies.empty() || c.extraction.gabor_orientations.empty())
        throw std::runtime_error("Gabor bank needs at least one frequency and orientation");
    if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0))
        throw std::runtime_error("test fraction must be in (0,1)");
    if (c.k < 2) throw std::runtime_error("k must be >= 2");
    if (c.models.empty()) throw std::runtime_error("no model kinds configured");
}

} // namespace bintex
