#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace bintex {

/// 8-bit single-channel raster. Pixels are stored row-major; the value of a
/// pixel is exactly the byte it was derived from.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("image dimensions must be positive");
    }

    std::uint8_t at(int row, int col) const {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }
    std::uint8_t& at(int row, int col) {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }

    bool operator==(const GrayImage&) const = default;
};

/// Image width as a function of file size. Half-open KB bands (1 KB = 1024
/// bytes): <10 KB -> 32, [10,30) -> 64, [30,60) -> 128, [60,100) -> 256,
/// [100,200) -> 384, [200,500) -> 512, [500,1000) -> 768, >=1000 KB -> 1024.
inline int width_for_size(std::uint64_t size_bytes) {
    if (size_bytes == 0) throw std::runtime_error("empty file");
    const std::uint64_t kb = 1024;
    if (size_bytes < 10 * kb) return 32;
    if (size_bytes < 30 * kb) return 64;
    if (size_bytes < 60 * kb) return 128;
    if (size_bytes < 100 * kb) return 256;
    if (size_bytes < 200 * kb) return 384;
    if (size_bytes < 500 * kb) return 512;
    if (size_bytes < 1000 * kb) return 768;
    return 1024;
}

/// One byte becomes one pixel, row-major. Height is ceil(len/width); the
/// final partial row is padded with 0x00. Width defaults to width_for_size.
inline GrayImage bytes_to_image(std::span<const std::uint8_t> data, int width = 0) {
    if (data.empty()) throw std::runtime_error("empty file");
    if (width < 0) throw std::invalid_argument("width must be >= 1");
    int w = width == 0 ? width_for_size(data.size()) : width;
    std::size_t h = (data.size() + w - 1) / static_cast<std::size_t>(w);
    GrayImage img(w, static_cast<int>(h));
    std::copy(data.begin(), data.end(), img.pixels.begin());
    return img;
}

inline GrayImage bytes_to_image(const std::vector<std::uint8_t>& data, int width = 0) {
    return bytes_to_image(std::span<const std::uint8_t>(data), width);
}

} // namespace bintex
