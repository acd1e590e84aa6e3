#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazeforage/errors.hpp"
#include "gazeforage/heatmap.hpp"
#include "gazeforage/image_io.hpp"

namespace gazeforage {

namespace detail {

inline void put_f32_le(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    char b[4] = {char(bits & 0xFF), char((bits >> 8) & 0xFF), char((bits >> 16) & 0xFF),
                 char((bits >> 24) & 0xFF)};
    out.write(b, 4);
}

inline float get_f32_le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    const std::uint32_t bits = std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
                               (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace detail

// Binary heatmap: row-major 32-bit little-endian floats at <path>, plus a
// JSON sidecar at <path>.json carrying dimensions and normalization mode.
inline void save_heatmap(const Heatmap& h, const std::string& path) {
    std::ofstream bin(path, std::ios::binary);
    if (!bin) throw HeatmapIoError("cannot write '" + path + "'");
    for (double v : h.values) detail::put_f32_le(bin, static_cast<float>(v));
    if (!bin) throw HeatmapIoError("short write to '" + path + "'");

    const nlohmann::json sidecar{{"width", h.width},
                                 {"height", h.height},
                                 {"normalization", to_string(h.normalization)}};
    std::ofstream meta(path + ".json");
    if (!meta) throw HeatmapIoError("cannot write '" + path + ".json'");
    meta << sidecar.dump(2) << '\n';
}

inline Heatmap load_heatmap(const std::string& path) {
    std::ifstream meta(path + ".json");
    if (!meta) throw HeatmapIoError("missing sidecar '" + path + ".json'");
    const nlohmann::json sidecar = nlohmann::json::parse(meta);

    Heatmap h;
    h.width = sidecar.at("width").get<int>();
    h.height = sidecar.at("height").get<int>();
    h.normalization = normalization_from_string(sidecar.at("normalization").get<std::string>());
    if (h.width <= 0 || h.height <= 0) throw HeatmapIoError("bad dimensions in sidecar");

    std::ifstream bin(path, std::ios::binary);
    if (!bin) throw HeatmapIoError("cannot read '" + path + "'");
    const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
    h.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) h.values[i] = detail::get_f32_le(bin);
    if (!bin) throw HeatmapIoError("truncated heatmap '" + path + "'");
    return h;
}

// Visualization export: 16-bit PGM scaled so the peak maps to 65535.
inline void save_heatmap_pgm(const Heatmap& h, const std::string& path) {
    const double peak = detail::value_max(h);
    if (!(peak > 0.0)) throw AllZeroMap();
    std::vector<std::uint16_t> pixels(h.values.size());
    for (std::size_t i = 0; i < h.values.size(); ++i)
        pixels[i] = static_cast<std::uint16_t>(std::lround(h.values[i] / peak * 65535.0));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw HeatmapIoError("cannot write '" + path + "'");
    write_pgm16(out, h.width, h.height, pixels);
}

}  // namespace gazeforage
