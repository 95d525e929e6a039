// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/core/image.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace relight {

// Portable float map: "PF" (RGB) or "Pf" (gray), float32, rows stored bottom to top.
inline void write_pfm(const ImageD &img, const std::filesystem::path &path) {
    if (img.channels() != 1 && img.channels() != 3) fail(ErrorKind::Shape, "PFM needs 1 or 3 channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    const bool little = std::endian::native == std::endian::little;
    out << (img.channels() == 3 ? "PF" : "Pf") << '\n'
        << img.width() << ' ' << img.height() << '\n'
        << (little ? "-1.0" : "1.0") << '\n';
    std::vector<float> row(static_cast<std::size_t>(img.width()) * img.channels());
    for (int y = img.height() - 1; y >= 0; --y) {
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < img.channels(); ++c) row[static_cast<std::size_t>(x) * img.channels() + c] = float(img(x, y, c));
        out.write(reinterpret_cast<const char *>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

inline ImageD read_pfm(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    std::string magic;
    int w = 0, h = 0;
    double scale = 0;
    in >> magic >> w >> h >> scale;
    if (!in || (magic != "PF" && magic != "Pf") || w <= 0 || h <= 0 || scale == 0)
        fail(ErrorKind::Parse, path.string() + ": not a PFM file");
    in.get();  // single whitespace before the raster
    const int channels = magic == "PF" ? 3 : 1;
    const bool file_little = scale < 0;
    const bool swap = file_little != (std::endian::native == std::endian::little);
    ImageD img(w, h, channels);
    std::vector<std::uint32_t> row(static_cast<std::size_t>(w) * channels);
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char *>(row.data()), static_cast<std::streamsize>(row.size() * 4));
        if (!in) fail(ErrorKind::Parse, path.string() + ": truncated PFM raster");
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::uint32_t bits = row[i];
            if (swap) bits = __builtin_bswap32(bits);
            float f;
            std::memcpy(&f, &bits, 4);
            img.data()[static_cast<std::size_t>(y) * row.size() + i] = f;
        }
    }
    return img;
}

}  // namespace relight
