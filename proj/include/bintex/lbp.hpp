#pragma once

#include <array>
#include <stdexcept>

#include "bintex/image.hpp"
#include "bintex/stats.hpp"

namespace bintex {

struct LbpFeatures {
    double lbp_energy = 0;
    double lbp_entropy = 0;
};

/// Normalized 256-bin histogram of 8-neighbor radius-1 codes over interior
/// pixels. Bit b is set iff the neighbor is >= the center; neighbors are
/// ordered starting east, counter-clockwise.
inline std::array<double, 256> lbp_histogram(const GrayImage& img) {
    if (img.width < 3 || img.height < 3)
        throw std::runtime_error("image too small for LBP");
    // (drow, dcol) for bits 0..7: E, NE, N, NW, W, SW, S, SE
    static constexpr int kDr[8] = {0, -1, -1, -1, 0, 1, 1, 1};
    static constexpr int kDc[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    std::array<double, 256> hist{};
    for (int r = 1; r < img.height - 1; ++r)
        for (int c = 1; c < img.width - 1; ++c) {
            int center = img.at(r, c);
            int code = 0;
            for (int b = 0; b < 8; ++b)
                if (img.at(r + kDr[b], c + kDc[b]) >= center) code |= 1 << b;
            hist[code] += 1.0;
        }
    double count = static_cast<double>(img.height - 2) * (img.width - 2);
    for (double& h : hist) h /= count;
    return hist;
}

inline LbpFeatures lbp_stats_from_histogram(const std::array<double, 256>& hist) {
    LbpFeatures f;
    f.lbp_energy = sum_of_squares(hist);
    f.lbp_entropy = shannon_entropy_bits(hist);
    return f;
}

inline LbpFeatures lbp_features(const GrayImage& img) {
    return lbp_stats_from_histogram(lbp_histogram(img));
}

} // namespace bintex
