#pragma once

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "bintex/image.hpp"

namespace bintex {

enum class ImageFormat { pgm, png };

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("read failure: " + path.string());
    return data;
}

inline void write_file_bytes(const std::filesystem::path& path,
                             const std::uint8_t* data, std::size_t n) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!out) throw std::runtime_error("write failure: " + path.string());
}

inline void put_be32(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(static_cast<std::uint8_t>(x >> 24));
    v.push_back(static_cast<std::uint8_t>(x >> 16));
    v.push_back(static_cast<std::uint8_t>(x >> 8));
    v.push_back(static_cast<std::uint8_t>(x));
}

inline std::uint32_t get_be32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

inline void append_png_chunk(std::vector<std::uint8_t>& out, const char type[4],
                             const std::vector<std::uint8_t>& payload) {
    put_be32(out, static_cast<std::uint32_t>(payload.size()));
    std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    std::uint32_t crc = static_cast<std::uint32_t>(
        ::crc32(0, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start)));
    put_be32(out, crc);
}

inline std::vector<std::uint8_t> encode_png(const GrayImage& img) {
    std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

    std::vector<std::uint8_t> ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(img.width));
    put_be32(ihdr, static_cast<std::uint32_t>(img.height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(0);  // color type: grayscale
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter method
    ihdr.push_back(0);  // no interlace
    append_png_chunk(out, "IHDR", ihdr);

    // filter byte 0 per scanline
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(img.height) * (img.width + 1));
    for (int r = 0; r < img.height; ++r) {
        raw.push_back(0);
        const std::uint8_t* row = img.pixels.data() + static_cast<std::size_t>(r) * img.width;
        raw.insert(raw.end(), row, row + img.width);
    }

    uLongf bound = ::compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(bound);
    if (::compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                    Z_BEST_COMPRESSION) != Z_OK)
        throw std::runtime_error("PNG deflate failed");
    compressed.resize(bound);
    append_png_chunk(out, "IDAT", compressed);
    append_png_chunk(out, "IEND", {});
    return out;
}

inline GrayImage decode_png(const std::vector<std::uint8_t>& data,
                            const std::string& context) {
    auto fail = [&](const std::string& what) -> GrayImage {
        throw std::runtime_error("PNG parse error (" + what + "): " + context);
    };
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    if (data.size() < 8 || std::memcmp(data.data(), sig, 8) != 0) return fail("bad signature");

    std::uint32_t width = 0, height = 0;
    bool have_ihdr = false, have_iend = false;
    std::vector<std::uint8_t> idat;

    std::size_t pos = 8;
    while (pos + 12 <= data.size() && !have_iend) {
        std::uint32_t len = get_be32(data.data() + pos);
        if (pos + 12 + len > data.size()) return fail("truncated chunk");
        std::string type(reinterpret_cast<const char*>(data.data() + pos + 4), 4);
        const std::uint8_t* payload = data.data() + pos + 8;
        std::uint32_t crc = get_be32(payload + len);
        std::uint32_t actual = static_cast<std::uint32_t>(
            ::crc32(0, data.data() + pos + 4, static_cast<uInt>(len + 4)));
        if (crc != actual) return fail("chunk CRC mismatch in " + type);

        if (type == "IHDR") {
            if (len != 13) return fail("IHDR length");
            width = get_be32(payload);
            height = get_be32(payload + 4);
            if (payload[8] != 8) return fail("unsupported bit depth");
            if (payload[9] != 0) return fail("unsupported color type (need 8-bit grayscale)");
            if (payload[12] != 0) return fail("interlacing unsupported");
            have_ihdr = true;
        } else if (type == "IDAT") {
            idat.insert(idat.end(), payload, payload + len);
        } else if (type == "IEND") {
            have_iend = true;
        } else if (!(type[0] & 0x20)) {
            return fail("unexpected critical chunk " + type);
        }
        pos += 12 + len;
    }
    if (!have_ihdr) return fail("missing IHDR");
    if (!have_iend) return fail("missing IEND");
    if (width == 0 || height == 0) return fail("zero dimension");

    std::size_t stride = width + 1;
    std::vector<std::uint8_t> raw(stride * height);
    uLongf raw_len = static_cast<uLongf>(raw.size());
    int rc = ::uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size()));
    if (rc != Z_OK || raw_len != raw.size()) return fail("inflate failed");

    GrayImage img(static_cast<int>(width), static_cast<int>(height));
    std::vector<std::uint8_t> prior(width, 0);
    for (std::uint32_t r = 0; r < height; ++r) {
        const std::uint8_t* line = raw.data() + static_cast<std::size_t>(r) * stride;
        std::uint8_t filter = line[0];
        std::uint8_t* cur = img.pixels.data() + static_cast<std::size_t>(r) * width;
        for (std::uint32_t c = 0; c < width; ++c) {
            int x = line[1 + c];
            int a = c > 0 ? cur[c - 1] : 0;  // left
            int b = prior[c];                // up
            int cc = c > 0 ? prior[c - 1] : 0;
            switch (filter) {
                case 0: break;
                case 1: x += a; break;
                case 2: x += b; break;
                case 3: x += (a + b) / 2; break;
                case 4: {
                    int p = a + b - cc;
                    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - cc);
                    x += (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : cc);
                    break;
                }
                default: return fail("unknown scanline filter");
            }
            cur[c] = static_cast<std::uint8_t>(x & 0xFF);
        }
        std::memcpy(prior.data(), cur, width);
    }
    return img;
}

// PGM header tokens are separated by whitespace; '#' starts a comment.
inline bool next_pgm_token(const std::vector<std::uint8_t>& data, std::size_t& pos,
                           std::string& token) {
    token.clear();
    while (pos < data.size()) {
        char ch = static_cast<char>(data[pos]);
        if (ch == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
        } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
            ++pos;
        } else {
            break;
        }
    }
    while (pos < data.size()) {
        char ch = static_cast<char>(data[pos]);
        if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n' || ch == '#') break;
        token.push_back(ch);
        ++pos;
    }
    return !token.empty();
}

inline GrayImage decode_pgm(const std::vector<std::uint8_t>& data,
                            const std::string& context) {
    auto fail = [&](const std::string& what) -> GrayImage {
        throw std::runtime_error("PGM parse error (" + what + "): " + context);
    };
    std::size_t pos = 2;  // past "P5"
    std::string tok;
    long vals[3];
    for (int i = 0; i < 3; ++i) {
        if (!next_pgm_token(data, pos, tok)) return fail("truncated header");
        try {
            vals[i] = std::stol(tok);
        } catch (const std::exception&) {
            return fail("non-numeric header field '" + tok + "'");
        }
    }
    long w = vals[0], h = vals[1], maxval = vals[2];
    if (w <= 0 || h <= 0) return fail("non-positive dimensions");
    if (maxval <= 0 || maxval > 255) return fail("unsupported maxval");
    if (pos >= data.size()) return fail("missing pixel data");
    ++pos;  // single whitespace byte after maxval
    std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (data.size() - pos < need) return fail("truncated pixel data");
    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    std::memcpy(img.pixels.data(), data.data() + pos, need);
    return img;
}

} // namespace detail

/// Writes a grayscale image. PGM is binary P5 with maxval 255; PNG is 8-bit
/// grayscale, no alpha. Both round-trip losslessly through read_image.
inline void write_image(const GrayImage& img, const std::filesystem::path& path,
                        ImageFormat format = ImageFormat::pgm) {
    if (format == ImageFormat::pgm) {
        std::string header = "P5\n" + std::to_string(img.width) + " " +
                             std::to_string(img.height) + "\n255\n";
        std::vector<std::uint8_t> out(header.begin(), header.end());
        out.insert(out.end(), img.pixels.begin(), img.pixels.end());
        detail::write_file_bytes(path, out.data(), out.size());
    } else {
        auto out = detail::encode_png(img);
        detail::write_file_bytes(path, out.data(), out.size());
    }
}

/// Reads a PGM (P5) or PNG grayscale image, detected by magic bytes.
inline GrayImage read_image(const std::filesystem::path& path) {
    auto data = detail::read_file_bytes(path);
    if (data.size() >= 2 && data[0] == 'P' && data[1] == '5')
        return detail::decode_pgm(data, path.string());
    if (data.size() >= 4 && data[0] == 0x89 && data[1] == 'P' && data[2] == 'N' && data[3] == 'G')
        return detail::decode_png(data, path.string());
    throw std::runtime_error("unsupported image format: " + path.string());
}

} // namespace bintex
