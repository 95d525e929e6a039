// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/core/image.hpp>
#include <relight/envlight/envmap.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace relight {

// Linear RGB raster with an optional coverage plane in [0,1].
struct ImageRGB {
    ImageD rgb;
    std::optional<ImageD> mask;

    ImageRGB() = default;
    explicit ImageRGB(ImageD rgb_, std::optional<ImageD> mask_ = std::nullopt)
        : rgb(std::move(rgb_)), mask(std::move(mask_)) {
        validate();
    }
    ImageRGB(int w, int h, const Vec3 &fill = {}) : rgb(w, h, 3) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) rgb.set_rgb(x, y, fill);
    }

    int width() const { return rgb.width(); }
    int height() const { return rgb.height(); }

    void validate() const {
        if (rgb.channels() != 3) fail(ErrorKind::Shape, "ImageRGB needs 3 channels");
        for (double v : rgb.data())
            if (!std::isfinite(v) || v < 0) fail(ErrorKind::Precondition, "image values must be finite and >= 0");
        if (mask) {
            if (!mask->same_raster(rgb) || mask->channels() != 1)
                fail(ErrorKind::Shape, "mask dimensions do not match the image");
            for (double v : mask->data())
                if (!(v >= 0 && v <= 1)) fail(ErrorKind::Precondition, "mask values must lie in [0,1]");
        }
    }
};

inline ImageD mask_from_coverage(const Mask8 &m) {
    ImageD out(m.width(), m.height(), 1);
    for (std::size_t i = 0; i < m.data().size(); ++i) out.data()[i] = m.data()[i] ? 1.0 : 0.0;
    return out;
}

// Relit image = albedo (x) shading, per pixel and channel. Keeps the albedo's mask.
inline ImageRGB compose_relit(const ImageRGB &albedo, const ImageRGB &shading) {
    if (!albedo.rgb.same_shape(shading.rgb))
        fail(ErrorKind::Shape, "albedo " + std::to_string(albedo.width()) + "x" + std::to_string(albedo.height()) +
                                   " and shading " + std::to_string(shading.width()) + "x" +
                                   std::to_string(shading.height()) + " differ");
    ImageRGB out;
    out.rgb = albedo.rgb;
    auto o = out.rgb.data();
    auto s = shading.rgb.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] *= s[i];
    out.mask = albedo.mask;
    return out;
}

struct RegionSpec {
    int row0 = 0, col0 = 0, rows = 0, cols = 0;
    int feather = 4;

    void validate(int width, int height) const {
        if (rows <= 0 || cols <= 0 || row0 < 0 || col0 < 0 || row0 + rows > height || col0 + cols > width)
            fail(ErrorKind::Shape, "region (" + std::to_string(row0) + "," + std::to_string(col0) + "," +
                                       std::to_string(rows) + "," + std::to_string(cols) + ") outside " +
                                       std::to_string(width) + "x" + std::to_string(height) + " raster");
        if (feather < 0 || 2 * feather >= std::min(rows, cols))
            fail(ErrorKind::Shape, "feather must be >= 0 and less than half the region size");
    }

    // Patch weight at a pixel inside the region: ramps linearly across the outer `feather`
    // pixels, (d + 0.5) / feather at distance d from the rectangle edge, and is 1 further in.
    double blend_weight(int row, int col) const {
        if (feather == 0) return 1.0;
        const int d = std::min({row - row0, row0 + rows - 1 - row, col - col0, col0 + cols - 1 - col});
        return std::min(1.0, (d + 0.5) / feather);
    }
};

inline ImageRGB crop(const ImageRGB &img, const RegionSpec &r) {
    r.validate(img.width(), img.height());
    ImageRGB out(r.cols, r.rows);
    if (img.mask) out.mask = ImageD(r.cols, r.rows, 1);
    for (int y = 0; y < r.rows; ++y)
        for (int x = 0; x < r.cols; ++x) {
            out.rgb.set_rgb(x, y, img.rgb.rgb(r.col0 + x, r.row0 + y));
            if (img.mask) (*out.mask)(x, y) = (*img.mask)(r.col0 + x, r.row0 + y);
        }
    return out;
}

// Pastes `patch` over `region` of `body`; feathered band blends linearly.
inline ImageRGB composite_region(const ImageRGB &body, const ImageRGB &patch, const RegionSpec &region) {
    region.validate(body.width(), body.height());
    if (patch.width() != region.cols || patch.height() != region.rows)
        fail(ErrorKind::Shape, "patch dimensions do not match the region");
    ImageRGB out = body;
    for (int y = 0; y < region.rows; ++y)
        for (int x = 0; x < region.cols; ++x) {
            const int row = region.row0 + y, col = region.col0 + x;
            const double w = region.blend_weight(row, col);
            if (w >= 1.0) {
                out.rgb.set_rgb(col, row, patch.rgb.rgb(x, y));
                if (out.mask && patch.mask) (*out.mask)(col, row) = (*patch.mask)(x, y);
            } else {
                out.rgb.set_rgb(col, row, (1 - w) * body.rgb.rgb(col, row) + w * patch.rgb.rgb(x, y));
                if (out.mask && patch.mask)
                    (*out.mask)(col, row) = (1 - w) * (*body.mask)(col, row) + w * (*patch.mask)(x, y);
            }
        }
    return out;
}

// Divides every value by the global maximum.
inline ImageRGB normalize_shading(const ImageRGB &shading) {
    double m = 0;
    for (double v : shading.rgb.data()) m = std::max(m, v);
    if (!(m > 0)) fail(ErrorKind::DegenerateInput, "cannot normalize an all-zero shading map");
    ImageRGB out = shading;
    if (m == 1.0) return out;
    for (double &v : out.rgb.data()) v /= m;
    return out;
}

struct BackgroundView {
    double azimuth_deg = 0;        // viewing direction phi, lat-long convention
    double vertical_fov_deg = 45;  // in (0, 180)
};

// Direction through pixel (x, y) of a level pinhole camera looking at `view.azimuth_deg`, +Y up.
inline Vec3 background_direction(const BackgroundView &view, int width, int height, int x, int y) {
    const double phi = view.azimuth_deg * kPi / 180.0;
    const Vec3 fwd{std::cos(phi), 0.0, std::sin(phi)};
    const Vec3 right{-std::sin(phi), 0.0, std::cos(phi)};
    const Vec3 up{0, 1, 0};
    const double th = std::tan(0.5 * view.vertical_fov_deg * kPi / 180.0);
    const double aspect = double(width) / height;
    const double sx = (2.0 * (x + 0.5) / width - 1.0) * th * aspect;
    const double sy = (1.0 - 2.0 * (y + 0.5) / height) * th;
    return normalize(fwd + right * sx + up * sy);
}

inline ImageD render_background(const EnvironmentMap &env, const BackgroundView &view, int width, int height) {
    ImageD bg(width, height, 3);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) bg.set_rgb(x, y, lookup_bilinear(env, background_direction(view, width, height, x, y)));
    return bg;
}

// Replaces the background (mask < 1) with the matching crop of the environment map and
// alpha-blends the foreground by the mask. Pixels with mask = 1 are copied unchanged.
inline ImageRGB composite_background(const ImageRGB &relit, const EnvironmentMap &env, const BackgroundView &view) {
    if (!relit.mask) fail(ErrorKind::Precondition, "background compositing needs a foreground mask");
    if (!(view.vertical_fov_deg > 0 && view.vertical_fov_deg < 180))
        fail(ErrorKind::Precondition, "vertical FOV must lie in (0, 180) degrees");
    const ImageD bg = render_background(env, view, relit.width(), relit.height());
    ImageRGB out = relit;
    for (int y = 0; y < relit.height(); ++y)
        for (int x = 0; x < relit.width(); ++x) {
            const double a = (*relit.mask)(x, y);
            if (a >= 1.0) continue;
            out.rgb.set_rgb(x, y, a * relit.rgb.rgb(x, y) + (1 - a) * bg.rgb(x, y));
        }
    return out;
}

}  // namespace relight
