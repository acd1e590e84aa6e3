#pragma once

#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "gazeforage/entropy.hpp"
#include "gazeforage/errors.hpp"

namespace gazeforage {

enum class ImageFormat { png, jpeg, pnm, unknown };

inline ImageFormat sniff_image_format(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageIoError("cannot open '" + path + "'");
    unsigned char magic[8] = {};
    in.read(reinterpret_cast<char*>(magic), sizeof(magic));
    if (in.gcount() >= 8 && magic[0] == 0x89 && magic[1] == 'P' && magic[2] == 'N' &&
        magic[3] == 'G')
        return ImageFormat::png;
    if (in.gcount() >= 2 && magic[0] == 0xFF && magic[1] == 0xD8) return ImageFormat::jpeg;
    if (in.gcount() >= 2 && magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6'))
        return ImageFormat::pnm;
    return ImageFormat::unknown;
}

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline RgbImage load_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw ImageIoError("cannot open '" + path + "'");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw ImageIoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw ImageIoError("png_create_info_struct failed");
    }

    RgbImage img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ImageIoError("failed to decode PNG '" + path + "'");
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (bit_depth == 16) png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    if (png_get_rowbytes(png, info) != static_cast<std::size_t>(img.width) * 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ImageIoError("unexpected PNG row layout in '" + path + "'");
    }
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    rows.resize(static_cast<std::size_t>(img.height));
    for (int r = 0; r < img.height; ++r)
        rows[static_cast<std::size_t>(r)] =
            img.pixels.data() + static_cast<std::size_t>(r) * img.width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(mgr->jump, 1);
}

inline RgbImage load_jpeg(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw ImageIoError("cannot open '" + path + "'");

    jpeg_decompress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit;

    RgbImage img;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw ImageIoError("failed to decode JPEG '" + path + "'");
    }

    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, fp.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    img.width = static_cast<int>(cinfo.output_width);
    img.height = static_cast<int>(cinfo.output_height);
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = img.pixels.data() +
                       static_cast<std::size_t>(cinfo.output_scanline) * img.width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

inline int pnm_read_token(std::istream& in) {
    // Skips whitespace and '#' comments, then reads one non-negative integer.
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            break;
        }
    }
    if (c == EOF) throw ImageIoError("truncated PNM header");
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}

inline RgbImage load_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageIoError("cannot open '" + path + "'");
    char p = 0, kind = 0;
    in.get(p);
    in.get(kind);
    if (p != 'P' || (kind != '5' && kind != '6'))
        throw ImageIoError("only binary P5/P6 PNM supported in '" + path + "'");
    const int w = pnm_read_token(in);
    const int h = pnm_read_token(in);
    const int maxval = pnm_read_token(in);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
        throw ImageIoError("bad PNM header in '" + path + "'");

    const int channels = kind == '6' ? 3 : 1;
    const std::size_t n = static_cast<std::size_t>(w) * h * channels;
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(n * bytes_per);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw ImageIoError("truncated PNM data in '" + path + "'");

    RgbImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t i = 0; i < n; ++i) {
        unsigned v = bytes_per == 2 ? (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1] : raw[i];
        const auto v8 = static_cast<std::uint8_t>(
            maxval == 255 ? v : std::lround(double(v) * 255.0 / double(maxval)));
        if (channels == 3) {
            img.pixels[i] = v8;
        } else {
            img.pixels[3 * i] = img.pixels[3 * i + 1] = img.pixels[3 * i + 2] = v8;
        }
    }
    return img;
}

}  // namespace detail

inline RgbImage load_rgb_image(const std::string& path) {
    switch (sniff_image_format(path)) {
        case ImageFormat::png: return detail::load_png(path);
        case ImageFormat::jpeg: return detail::load_jpeg(path);
        case ImageFormat::pnm: return detail::load_pnm(path);
        default: throw UnsupportedPixelFormat("'" + path + "' is not PNG, JPEG or binary PNM");
    }
}

inline GrayImage load_gray_image(const std::string& path) {
    return luminance_convert(load_rgb_image(path));
}

// 16-bit binary PGM, most significant byte first as the format requires.
inline void write_pgm16(std::ostream& out, int width, int height,
                        const std::vector<std::uint16_t>& pixels) {
    out << "P5\n" << width << ' ' << height << "\n65535\n";
    for (std::uint16_t v : pixels) {
        out.put(static_cast<char>(v >> 8));
        out.put(static_cast<char>(v & 0xFF));
    }
}

}  // namespace gazeforage
