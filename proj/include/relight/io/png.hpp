// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/core/image.hpp>

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace relight {

// Raw PNG access through libpng. Samples map to [0,1] without any transfer curve;
// gamma handling lives in image_io.hpp.

namespace detail {

struct FileCloser {
    void operator()(std::FILE *f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Returns false on a libpng error (longjmp target kept free of objects with destructors).
inline bool png_write_raw(std::FILE *fp, int w, int h, int channels, int bit_depth, png_bytep *rows) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, info ? &info : nullptr);
        return false;
    }
    png_init_io(png, fp);
    const int color = channels == 1 ? PNG_COLOR_TYPE_GRAY : (channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_RGBA);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth, color,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

struct PngRaw {
    int width = 0, height = 0, channels = 0, bit_depth = 0;
    std::vector<unsigned char> bytes;
};

inline bool png_read_raw(std::FILE *fp, PngRaw &raw) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        return false;
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (depth == 16) png_set_swap(png);
    png_read_update_info(png, info);
    raw.width = static_cast<int>(png_get_image_width(png, info));
    raw.height = static_cast<int>(png_get_image_height(png, info));
    raw.channels = png_get_channels(png, info);
    raw.bit_depth = png_get_bit_depth(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    raw.bytes.resize(stride * raw.height);
    std::vector<png_bytep> rows(raw.height);
    for (int y = 0; y < raw.height; ++y) rows[y] = raw.bytes.data() + stride * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

}  // namespace detail

// Quantizes values in [0,1] (clamped) to 8 or 16 bits.
inline void write_png(const ImageD &img, const std::filesystem::path &path, int bit_depth = 8) {
    if (bit_depth != 8 && bit_depth != 16) fail(ErrorKind::Precondition, "PNG bit depth must be 8 or 16");
    if (img.channels() != 1 && img.channels() != 3 && img.channels() != 4)
        fail(ErrorKind::Shape, "PNG output needs 1, 3 or 4 channels");
    const int w = img.width(), h = img.height(), ch = img.channels();
    const int bytes_per = bit_depth / 8;
    const double maxv = bit_depth == 8 ? 255.0 : 65535.0;
    std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h * ch * bytes_per);
    std::size_t k = 0;
    for (double v : img.data()) {
        const auto q = static_cast<std::uint32_t>(std::lround(std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0) * maxv));
        if (bytes_per == 1) {
            buf[k++] = static_cast<unsigned char>(q);
        } else {
            const auto s = static_cast<std::uint16_t>(q);
            std::memcpy(&buf[k], &s, 2);
            k += 2;
        }
    }
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = buf.data() + static_cast<std::size_t>(y) * w * ch * bytes_per;
    detail::FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) fail(ErrorKind::Io, "cannot write " + path.string());
    if (!detail::png_write_raw(fp.get(), w, h, ch, bit_depth, rows.data()))
        fail(ErrorKind::Io, "libpng failed writing " + path.string());
}

inline ImageD read_png(const std::filesystem::path &path) {
    detail::FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) fail(ErrorKind::Io, "cannot open " + path.string());
    detail::PngRaw raw;
    if (!detail::png_read_raw(fp.get(), raw)) fail(ErrorKind::Parse, path.string() + ": invalid PNG");
    ImageD img(raw.width, raw.height, raw.channels);
    auto out = img.data();
    if (raw.bit_depth == 16) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            std::uint16_t s;
            std::memcpy(&s, &raw.bytes[i * 2], 2);
            out[i] = s / 65535.0;
        }
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = raw.bytes[i] / 255.0;
    }
    return img;
}

}  // namespace relight
