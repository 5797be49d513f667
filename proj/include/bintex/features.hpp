#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "bintex/gabor.hpp"
#include "bintex/glcm.hpp"
#include "bintex/lbp.hpp"

namespace bintex {

/// The ten base features, in the fixed column order.
inline const std::vector<std::string>& base_feature_names() {
    static const std::vector<std::string> names = {
        "energy",     "entropy",     "contrast",     "dissimilarity", "homogeneity",
        "correlation", "lbp_energy", "lbp_entropy",  "gabor_energy",  "gabor_entropy"};
    return names;
}

/// Named feature values plus labels for one sample. Names and values are
/// parallel, in schema order.
struct FeatureRecord {
    std::string source_id;
    std::string family;      // sub-class label
    std::string main_class;  // main-class label
    std::vector<std::string> names;
    std::vector<double> values;

    void push(std::string name, double value) {
        names.push_back(std::move(name));
        values.push_back(value);
    }

    bool has(const std::string& name) const {
        for (const auto& n : names)
            if (n == name) return true;
        return false;
    }

    double value(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return values[i];
        throw std::runtime_error("missing feature: " + name);
    }
};

enum class Transform { log, square, cube };

inline std::string transform_suffix(Transform t) {
    switch (t) {
        case Transform::log: return "_log";
        case Transform::square: return "_sq";
        case Transform::cube: return "_cube";
    }
    return "";
}

inline std::string to_string(Transform t) {
    switch (t) {
        case Transform::log: return "log";
        case Transform::square: return "square";
        case Transform::cube: return "cube";
    }
    return "?";
}

inline Transform transform_from_string(const std::string& s) {
    if (s == "log") return Transform::log;
    if (s == "square") return Transform::square;
    if (s == "cube") return Transform::cube;
    throw std::runtime_error("unknown transform: " + s);
}

/// How the per-offset GLCMs combine: one accumulated matrix, or one feature
/// set per offset averaged afterwards.
enum class GlcmOffsetMode { accumulate, average };

inline std::string to_string(GlcmOffsetMode m) {
    return m == GlcmOffsetMode::accumulate ? "accumulate" : "average";
}

inline GlcmOffsetMode glcm_offset_mode_from_string(const std::string& s) {
    if (s == "accumulate") return GlcmOffsetMode::accumulate;
    if (s == "average") return GlcmOffsetMode::average;
    throw std::runtime_error("unknown GLCM offset mode: " + s);
}

struct ExtractionConfig {
    int glcm_levels = 32;
    std::vector<GlcmOffset> glcm_offsets = {{0, 1}};
    bool glcm_symmetric = true;
    GlcmOffsetMode glcm_offset_mode = GlcmOffsetMode::accumulate;
    std::vector<double> gabor_frequencies = default_gabor_frequencies();
    std::vector<double> gabor_orientations = default_gabor_orientations();
    double gabor_sigma_factor = 0.56;
    std::vector<Transform> transforms = {Transform::log, Transform::square, Transform::cube};

    bool operator==(const ExtractionConfig&) const = default;
};

/// Computes the ten base features with the configured parameters. Labels are
/// left unset.
inline FeatureRecord extract_features(const GrayImage& img, const ExtractionConfig& cfg,
                                      const GaborBank& bank) {
    QuantImage q = quantize(img, cfg.glcm_levels);
    GlcmFeatures gf;
    if (cfg.glcm_offset_mode == GlcmOffsetMode::average && cfg.glcm_offsets.size() > 1) {
        for (const auto& off : cfg.glcm_offsets) {
            GlcmFeatures one = glcm_features(compute_glcm(q, {off}, cfg.glcm_symmetric));
            gf.energy += one.energy;
            gf.entropy += one.entropy;
            gf.contrast += one.contrast;
            gf.dissimilarity += one.dissimilarity;
            gf.homogeneity += one.homogeneity;
            gf.correlation += one.correlation;
        }
        double n = static_cast<double>(cfg.glcm_offsets.size());
        gf.energy /= n;
        gf.entropy /= n;
        gf.contrast /= n;
        gf.dissimilarity /= n;
        gf.homogeneity /= n;
        gf.correlation /= n;
    } else {
        gf = glcm_features(compute_glcm(q, cfg.glcm_offsets, cfg.glcm_symmetric));
    }
    LbpFeatures lf = lbp_features(img);
    GaborFeatures gbf = gabor_features(img, bank);

    FeatureRecord rec;
    rec.push("energy", gf.energy);
    rec.push("entropy", gf.entropy);
    rec.push("contrast", gf.contrast);
    rec.push("dissimilarity", gf.dissimilarity);
    rec.push("homogeneity", gf.homogeneity);
    rec.push("correlation", gf.correlation);
    rec.push("lbp_energy", lf.lbp_energy);
    rec.push("lbp_entropy", lf.lbp_entropy);
    rec.push("gabor_energy", gbf.gabor_energy);
    rec.push("gabor_entropy", gbf.gabor_entropy);
    return rec;
}

inline FeatureRecord extract_features(const GrayImage& img,
                                      const ExtractionConfig& cfg = {}) {
    GaborBank bank = build_gabor_bank(cfg.gabor_frequencies, cfg.gabor_orientations,
                                      cfg.gabor_sigma_factor);
    return extract_features(img, cfg, bank);
}

/// Signed log transform: ln(1+|x|)*sign(x). Total and monotone, so negative
/// features (correlation) stay ordered.
inline double signed_log(double x) {
    double v = std::log1p(std::abs(x));
    return x < 0 ? -v : v;
}

/// Appends engineered columns per base feature, grouped by base in
/// log/square/cube order. Base columns are unchanged.
inline FeatureRecord engineer_features(const FeatureRecord& rec,
                                       const std::vector<Transform>& transforms) {
    FeatureRecord out = rec;
    const std::size_t n_base = rec.names.size();
    static constexpr Transform kOrder[] = {Transform::log, Transform::square, Transform::cube};
    for (std::size_t i = 0; i < n_base; ++i) {
        double x = rec.values[i];
        for (Transform t : kOrder) {
            bool wanted = false;
            for (Transform u : transforms)
                if (u == t) wanted = true;
            if (!wanted) continue;
            double v = 0;
            switch (t) {
                case Transform::log: v = signed_log(x); break;
                case Transform::square: v = x * x; break;
                case Transform::cube: v = x * x * x; break;
            }
            out.push(rec.names[i] + transform_suffix(t), v);
        }
    }
    return out;
}

} // namespace bintex
