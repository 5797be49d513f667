#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bintex/image.hpp"
#include "bintex/stats.hpp"

namespace bintex {

/// Image reduced to a small number of gray levels, values in [0, levels-1].
struct QuantImage {
    int width = 0;
    int height = 0;
    int levels = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int row, int col) const {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }
};

/// Pixel p maps to floor(p * levels / 256); 2 <= levels <= 256.
inline QuantImage quantize(const GrayImage& img, int levels) {
    if (levels < 2 || levels > 256)
        throw std::invalid_argument("levels out of range [2,256]");
    QuantImage q;
    q.width = img.width;
    q.height = img.height;
    q.levels = levels;
    q.pixels.resize(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        q.pixels[i] = static_cast<std::uint8_t>(img.pixels[i] * levels / 256);
    return q;
}

/// Offset between a pixel and its neighbor, in (row, col) steps.
struct GlcmOffset {
    int drow = 0;
    int dcol = 1;
    bool operator==(const GlcmOffset&) const = default;
};

/// Normalized gray-level co-occurrence matrix. Entries sum to 1; with
/// symmetric accumulation (the default) the matrix is symmetric.
struct Glcm {
    int levels = 0;
    std::vector<double> probs;  // levels x levels, row-major

    double p(int i, int j) const { return probs[static_cast<std::size_t>(i) * levels + j]; }
    double& p(int i, int j) { return probs[static_cast<std::size_t>(i) * levels + j]; }
};

/// Counts co-occurrences of (value at p, value at p+offset) over all
/// in-bounds positions and all offsets; symmetric accumulation also counts
/// the transposed pair. Normalized to sum 1.
inline Glcm compute_glcm(const QuantImage& qimg, const std::vector<GlcmOffset>& offsets,
                         bool symmetric = true) {
    if (offsets.empty()) throw std::invalid_argument("no offsets given");
    Glcm g;
    g.levels = qimg.levels;
    g.probs.assign(static_cast<std::size_t>(qimg.levels) * qimg.levels, 0.0);
    double total = 0.0;
    for (const auto& off : offsets) {
        for (int r = 0; r < qimg.height; ++r) {
            int r2 = r + off.drow;
            if (r2 < 0 || r2 >= qimg.height) continue;
            for (int c = 0; c < qimg.width; ++c) {
                int c2 = c + off.dcol;
                if (c2 < 0 || c2 >= qimg.width) continue;
                int a = qimg.at(r, c), b = qimg.at(r2, c2);
                g.p(a, b) += 1.0;
                total += 1.0;
                if (symmetric) {
                    g.p(b, a) += 1.0;
                    total += 1.0;
                }
            }
        }
    }
    if (total == 0.0) throw std::runtime_error("no pixel pairs");
    for (double& v : g.probs) v /= total;
    return g;
}

/// The six co-occurrence statistics.
struct GlcmFeatures {
    double energy = 0;
    double entropy = 0;
    double contrast = 0;
    double dissimilarity = 0;
    double homogeneity = 0;
    double correlation = 0;
};

/// energy = sum P^2; entropy = -sum P log2 P; contrast = sum (i-j)^2 P;
/// dissimilarity = sum |i-j| P; homogeneity = sum P/(1+(i-j)^2);
/// correlation = sum (i-mu_i)(j-mu_j) P / (sigma_i sigma_j), with marginal
/// means and population std-devs. A degenerate sigma_i*sigma_j == 0 gives
/// correlation 1 (constant texture is perfectly self-correlated).
inline GlcmFeatures glcm_features(const Glcm& g) {
    GlcmFeatures f;
    const int L = g.levels;
    std::vector<double> row_marginal(L, 0.0), col_marginal(L, 0.0);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            double p = g.p(i, j);
            row_marginal[i] += p;
            col_marginal[j] += p;
            if (p > 0.0) {
                f.energy += p * p;
                f.entropy -= p * std::log2(p);
                double d = static_cast<double>(i - j);
                f.contrast += d * d * p;
                f.dissimilarity += std::abs(d) * p;
            }
            f.homogeneity += p / (1.0 + static_cast<double>(i - j) * (i - j));
        }
    double mu_i = 0, mu_j = 0;
    for (int i = 0; i < L; ++i) {
        mu_i += i * row_marginal[i];
        mu_j += i * col_marginal[i];
    }
    double var_i = 0, var_j = 0;
    for (int i = 0; i < L; ++i) {
        var_i += (i - mu_i) * (i - mu_i) * row_marginal[i];
        var_j += (i - mu_j) * (i - mu_j) * col_marginal[i];
    }
    double denom = std::sqrt(var_i) * std::sqrt(var_j);
    if (denom == 0.0) {
        f.correlation = 1.0;
    } else {
        double cov = 0;
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < L; ++j) {
                double p = g.p(i, j);
                if (p != 0.0) cov += (i - mu_i) * (j - mu_j) * p;
            }
        f.correlation = cov / denom;
    }
    return f;
}

} // namespace bintex
