#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gazeforage/errors.hpp"

namespace gazeforage {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, 256 intensity levels
};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, interleaved R,G,B
};

struct EntropyResult {
    double bits = 0.0;
};

// Shannon entropy of the 256-bin intensity histogram, in bits. Depends only
// on the histogram, so it is invariant under pixel permutations and tops out
// at 8 bits for a uniform histogram.
inline EntropyResult image_entropy(const GrayImage& img) {
    if (img.width <= 0 || img.height <= 0 || img.pixels.empty()) throw EmptyImage();

    std::array<std::uint64_t, 256> hist{};
    for (std::uint8_t p : img.pixels) ++hist[p];

    const double n = static_cast<double>(img.pixels.size());
    double bits = 0.0;
    for (std::uint64_t c : hist) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        bits -= p * std::log2(p);
    }
    return {bits};
}

// Rec.601 luminance, rounded half away from zero.
inline GrayImage luminance_convert(const RgbImage& rgb) {
    if (rgb.pixels.size() != static_cast<std::size_t>(rgb.width) * rgb.height * 3)
        throw UnsupportedPixelFormat("expected 8-bit interleaved RGB");
    GrayImage g;
    g.width = rgb.width;
    g.height = rgb.height;
    g.pixels.resize(static_cast<std::size_t>(rgb.width) * rgb.height);
    for (std::size_t i = 0; i < g.pixels.size(); ++i) {
        const double y = 0.299 * rgb.pixels[3 * i] + 0.587 * rgb.pixels[3 * i + 1] +
                         0.114 * rgb.pixels[3 * i + 2];
        g.pixels[i] = static_cast<std::uint8_t>(std::lround(y));
    }
    return g;
}

inline double pearson_correlation(std::span<const std::pair<double, double>> pairs) {
    if (pairs.size() < 3) throw Error("pearson correlation needs at least 3 pairs");
    double mx = 0, my = 0;
    for (const auto& [x, y] : pairs) {
        mx += x;
        my += y;
    }
    mx /= double(pairs.size());
    my /= double(pairs.size());
    double sxx = 0, syy = 0, sxy = 0;
    for (const auto& [x, y] : pairs) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateVariance();
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace gazeforage
