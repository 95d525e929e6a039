// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/core/image.hpp>
#include <relight/envlight/envmap.hpp>
#include <relight/io/hdr.hpp>
#include <relight/io/pfm.hpp>
#include <relight/io/png.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <string>

namespace relight {

inline constexpr double kDisplayGamma = 2.2;

inline std::string lower_extension(const std::filesystem::path &path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

// Linear image from PFM, HDR or PNG. PNG color channels are gamma-2.2 decoded; a fourth
// (alpha) channel is kept linear.
inline ImageD read_linear_image(const std::filesystem::path &path) {
    const std::string ext = lower_extension(path);
    if (ext == ".pfm") return read_pfm(path);
    if (ext == ".hdr" || ext == ".rgbe" || ext == ".pic") return read_hdr(path);
    if (ext == ".png") {
        ImageD img = read_png(path);
        const int color = img.channels() >= 3 ? 3 : img.channels() == 2 ? 1 : img.channels();
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x)
                for (int c = 0; c < color; ++c) img(x, y, c) = std::pow(img(x, y, c), kDisplayGamma);
        return img;
    }
    fail(ErrorKind::Io, "unsupported image format '" + ext + "' for " + path.string());
}

// Writes linear data: PFM/HDR verbatim, PNG gamma-2.2 encoded at 8 bits.
inline void write_linear_image(const ImageD &img, const std::filesystem::path &path) {
    const std::string ext = lower_extension(path);
    if (ext == ".pfm") return write_pfm(img, path);
    if (ext == ".hdr") return write_hdr(img, path);
    if (ext == ".png") {
        ImageD enc = img;
        const int color = std::min(img.channels(), 3);
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x)
                for (int c = 0; c < color; ++c) enc(x, y, c) = std::pow(std::max(img(x, y, c), 0.0), 1.0 / kDisplayGamma);
        return write_png(enc, path, 8);
    }
    fail(ErrorKind::Io, "unsupported image format '" + ext + "' for " + path.string());
}

inline EnvironmentMap read_envmap(const std::filesystem::path &path) {
    ImageD img = read_linear_image(path);
    if (img.channels() == 1) {
        ImageD rgb(img.width(), img.height(), 3);
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x) rgb.set_rgb(x, y, Vec3{1, 1, 1} * img(x, y));
        img = std::move(rgb);
    }
    if (img.channels() != 3) fail(ErrorKind::Shape, path.string() + ": environment map must be RGB");
    return EnvironmentMap(std::move(img));
}

inline void write_envmap(const EnvironmentMap &map, const std::filesystem::path &path) {
    const std::string ext = lower_extension(path);
    if (ext != ".pfm" && ext != ".hdr") fail(ErrorKind::Io, "environment maps are written as .pfm or .hdr");
    write_linear_image(map.image(), path);
}

// Single-channel mask in [0,1]. Reads PNG (no gamma; any channel count, first channel used) or PFM.
inline ImageD read_mask(const std::filesystem::path &path) {
    const std::string ext = lower_extension(path);
    ImageD img = ext == ".png" ? read_png(path) : read_linear_image(path);
    ImageD m(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) m(x, y) = std::clamp(img(x, y, 0), 0.0, 1.0);
    return m;
}

}  // namespace relight
