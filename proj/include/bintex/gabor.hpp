#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bintex/image.hpp"
#include "bintex/stats.hpp"

namespace bintex {

/// One even/odd (cosine/sine phase) kernel pair of a Gabor filter.
struct GaborKernel {
    double frequency = 0;    // cycles/pixel
    double orientation = 0;  // radians
    double sigma = 0;        // pixels
    int side = 0;            // odd kernel side length
    std::vector<double> even;  // DC-corrected to zero mean
    std::vector<double> odd;
};

struct GaborBank {
    std::vector<GaborKernel> kernels;

    int max_side() const {
        int m = 0;
        for (const auto& k : kernels) m = std::max(m, k.side);
        return m;
    }
};

inline std::vector<double> default_gabor_frequencies() { return {0.125, 0.25}; }
inline std::vector<double> default_gabor_orientations() {
    const double pi = 3.14159265358979323846;
    return {0.0, pi / 4, pi / 2, 3 * pi / 4};
}

/// One kernel pair per (frequency, orientation). sigma = sigma_factor/frequency
/// (default 0.56, about one octave of bandwidth); side = 2*ceil(3*sigma)+1.
inline GaborBank build_gabor_bank(const std::vector<double>& frequencies,
                                  const std::vector<double>& orientations,
                                  double sigma_factor = 0.56) {
    if (frequencies.empty() || orientations.empty())
        throw std::invalid_argument("Gabor bank needs at least one frequency and orientation");
    if (sigma_factor <= 0.0) throw std::invalid_argument("sigma factor must be positive");
    for (double f : frequencies)
        if (!(f > 0.0 && f <= 0.5))
            throw std::invalid_argument("Gabor frequency must be in (0, 0.5]");

    GaborBank bank;
    for (double f : frequencies)
        for (double theta : orientations) {
            GaborKernel k;
            k.frequency = f;
            k.orientation = theta;
            k.sigma = sigma_factor / f;
            int half = static_cast<int>(std::ceil(3.0 * k.sigma));
            k.side = 2 * half + 1;
            k.even.resize(static_cast<std::size_t>(k.side) * k.side);
            k.odd.resize(k.even.size());
            const double ct = std::cos(theta), st = std::sin(theta);
            const double two_pi_f = 2.0 * 3.14159265358979323846 * f;
            const double inv_2s2 = 1.0 / (2.0 * k.sigma * k.sigma);
            double even_sum = 0.0;
            for (int y = -half; y <= half; ++y)
                for (int x = -half; x <= half; ++x) {
                    double xr = x * ct + y * st;
                    double yr = -x * st + y * ct;
                    double env = std::exp(-(xr * xr + yr * yr) * inv_2s2);
                    std::size_t idx =
                        static_cast<std::size_t>(y + half) * k.side + (x + half);
                    k.even[idx] = env * std::cos(two_pi_f * xr);
                    k.odd[idx] = env * std::sin(two_pi_f * xr);
                    even_sum += k.even[idx];
                }
            double dc = even_sum / static_cast<double>(k.even.size());
            for (double& v : k.even) v -= dc;
            bank.kernels.push_back(std::move(k));
        }
    return bank;
}

/// Cross-correlation with a square kernel, same-size output, mirrored borders
/// (edge pixel not repeated).
inline std::vector<double> convolve_reflect(const GrayImage& img,
                                            const std::vector<double>& kernel, int side) {
    const int half = side / 2;
    std::vector<double> out(static_cast<std::size_t>(img.width) * img.height, 0.0);
    auto reflect = [](int i, int n) {
        if (i < 0) return -i;
        if (i >= n) return 2 * n - 2 - i;
        return i;
    };
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) {
            double acc = 0.0;
            for (int dr = -half; dr <= half; ++dr) {
                int rr = reflect(r + dr, img.height);
                const std::uint8_t* row =
                    img.pixels.data() + static_cast<std::size_t>(rr) * img.width;
                const double* krow =
                    kernel.data() + static_cast<std::size_t>(dr + half) * side;
                for (int dc = -half; dc <= half; ++dc)
                    acc += krow[dc + half] * row[reflect(c + dc, img.width)];
            }
            out[static_cast<std::size_t>(r) * img.width + c] = acc;
        }
    return out;
}

struct GaborFeatures {
    double gabor_energy = 0;
    double gabor_entropy = 0;
};

/// Per kernel pair: convolve, take squared magnitude even^2 + odd^2, average
/// over pixels -> e_k. gabor_energy is the mean of e_k over the bank scaled
/// by 1/255^2; gabor_entropy is the entropy of {e_k} normalized to sum 1.
/// Total response below 1e-12 counts as zero and gives entropy 0.
inline GaborFeatures gabor_features(const GrayImage& img, const GaborBank& bank) {
    if (bank.kernels.empty()) throw std::invalid_argument("empty Gabor bank");
    int m = bank.max_side();
    if (img.width < m || img.height < m)
        throw std::runtime_error("image too small for Gabor bank");

    std::vector<double> energies;
    energies.reserve(bank.kernels.size());
    for (const auto& k : bank.kernels) {
        auto re = convolve_reflect(img, k.even, k.side);
        auto ro = convolve_reflect(img, k.odd, k.side);
        double sum = 0.0;
        for (std::size_t i = 0; i < re.size(); ++i)
            sum += re[i] * re[i] + ro[i] * ro[i];
        energies.push_back(sum / static_cast<double>(re.size()));
    }

    GaborFeatures f;
    double total = 0.0;
    for (double e : energies) total += e;
    f.gabor_energy = total / static_cast<double>(energies.size()) / (255.0 * 255.0);
    if (total > 1e-12) {
        std::vector<double> dist(energies);
        for (double& e : dist) e /= total;
        f.gabor_entropy = shannon_entropy_bits(dist);
    }
    return f;
}

} // namespace bintex
