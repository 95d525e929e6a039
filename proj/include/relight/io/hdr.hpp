// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/core/image.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace relight {

// Radiance RGBE (.hdr). Reads flat and new-style run-length scanlines; writes run-length
// scanlines when the width allows it (8..32767), flat otherwise.

namespace detail {

inline void rgbe_encode(double r, double g, double b, unsigned char out[4]) {
    const double v = std::max({r, g, b});
    if (v < 1e-32) {
        out[0] = out[1] = out[2] = out[3] = 0;
        return;
    }
    int e;
    const double m = std::frexp(v, &e) * 256.0 / v;
    out[0] = static_cast<unsigned char>(r * m);
    out[1] = static_cast<unsigned char>(g * m);
    out[2] = static_cast<unsigned char>(b * m);
    out[3] = static_cast<unsigned char>(e + 128);
}

inline void rgbe_decode(const unsigned char in[4], double &r, double &g, double &b) {
    if (in[3] == 0) {
        r = g = b = 0;
        return;
    }
    const double f = std::ldexp(1.0, int(in[3]) - (128 + 8));
    r = (in[0] + 0.5) * f;
    g = (in[1] + 0.5) * f;
    b = (in[2] + 0.5) * f;
}

}  // namespace detail

inline ImageD read_hdr(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line.rfind("#?", 0) != 0) fail(ErrorKind::Parse, path.string() + ": missing Radiance signature");
    bool rgbe = true;
    while (std::getline(in, line) && !line.empty()) {
        if (line.rfind("FORMAT=", 0) == 0 && line != "FORMAT=32-bit_rle_rgbe") rgbe = false;
    }
    if (!rgbe) fail(ErrorKind::Parse, path.string() + ": only 32-bit_rle_rgbe is supported");
    std::getline(in, line);
    int w = 0, h = 0;
    char ys[3] = {0}, xs[3] = {0};
    if (std::sscanf(line.c_str(), "%2s %d %2s %d", ys, &h, xs, &w) != 4 || std::string(ys) != "-Y" ||
        std::string(xs) != "+X" || w <= 0 || h <= 0)
        fail(ErrorKind::Parse, path.string() + ": unsupported resolution line '" + line + "'");

    ImageD img(w, h, 3);
    std::vector<unsigned char> scan(static_cast<std::size_t>(w) * 4);
    auto get = [&]() -> int {
        const int c = in.get();
        if (c == EOF) fail(ErrorKind::Parse, path.string() + ": truncated raster");
        return c;
    };
    for (int y = 0; y < h; ++y) {
        unsigned char head[4];
        for (auto &b : head) b = static_cast<unsigned char>(get());
        const bool rle = w >= 8 && w < 32768 && head[0] == 2 && head[1] == 2 && !(head[2] & 0x80);
        if (rle) {
            if (((head[2] << 8) | head[3]) != w) fail(ErrorKind::Parse, path.string() + ": scanline width mismatch");
            for (int c = 0; c < 4; ++c) {
                int x = 0;
                while (x < w) {
                    int count = get();
                    if (count > 128) {
                        count -= 128;
                        const int value = get();
                        if (x + count > w) fail(ErrorKind::Parse, path.string() + ": bad run");
                        for (int k = 0; k < count; ++k) scan[static_cast<std::size_t>(x++) * 4 + c] = static_cast<unsigned char>(value);
                    } else {
                        if (count == 0 || x + count > w) fail(ErrorKind::Parse, path.string() + ": bad run");
                        for (int k = 0; k < count; ++k) scan[static_cast<std::size_t>(x++) * 4 + c] = static_cast<unsigned char>(get());
                    }
                }
            }
        } else {
            std::copy(head, head + 4, scan.begin());
            for (std::size_t i = 4; i < scan.size(); ++i) scan[i] = static_cast<unsigned char>(get());
        }
        for (int x = 0; x < w; ++x) {
            double r, g, b;
            detail::rgbe_decode(&scan[static_cast<std::size_t>(x) * 4], r, g, b);
            img.set_rgb(x, y, {r, g, b});
        }
    }
    return img;
}

inline void write_hdr(const ImageD &img, const std::filesystem::path &path) {
    if (img.channels() != 3) fail(ErrorKind::Shape, "HDR output needs 3 channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    const int w = img.width(), h = img.height();
    out << "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " << h << " +X " << w << "\n";
    std::vector<unsigned char> scan(static_cast<std::size_t>(w) * 4);
    std::vector<unsigned char> buf;
    const bool rle = w >= 8 && w < 32768;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Vec3 v = img.rgb(x, y);
            detail::rgbe_encode(std::max(v.x, 0.0), std::max(v.y, 0.0), std::max(v.z, 0.0), &scan[static_cast<std::size_t>(x) * 4]);
        }
        if (!rle) {
            out.write(reinterpret_cast<const char *>(scan.data()), static_cast<std::streamsize>(scan.size()));
            continue;
        }
        buf.clear();
        buf.insert(buf.end(), {2, 2, static_cast<unsigned char>(w >> 8), static_cast<unsigned char>(w & 0xff)});
        for (int c = 0; c < 4; ++c) {
            auto at = [&](int x) { return scan[static_cast<std::size_t>(x) * 4 + c]; };
            int x = 0;
            while (x < w) {
                int run = 1;
                while (x + run < w && run < 127 && at(x + run) == at(x)) ++run;
                if (run >= 4) {
                    buf.push_back(static_cast<unsigned char>(128 + run));
                    buf.push_back(at(x));
                    x += run;
                    continue;
                }
                // Literal block up to the next run of 4 or 128 values.
                int end = x;
                while (end < w && end - x < 128) {
                    int r = 1;
                    while (end + r < w && r < 4 && at(end + r) == at(end)) ++r;
                    if (r >= 4) break;
                    ++end;
                }
                buf.push_back(static_cast<unsigned char>(end - x));
                for (int k = x; k < end; ++k) buf.push_back(at(k));
                x = end;
            }
        }
        out.write(reinterpret_cast<const char *>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace relight
