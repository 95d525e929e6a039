// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/core/image.hpp>
#include <relight/core/vec.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace relight {

// Equirectangular linear-radiance panorama.
//
// Convention used by every function in this module:
//   row 0 is the north pole (+Y); theta = pi * (row + v) / H is measured from +Y,
//   phi = 2 pi * (col + u) / W is measured from +X toward +Z, and
//   direction = (sin theta cos phi, cos theta, sin theta sin phi).
class EnvironmentMap {
  public:
    EnvironmentMap() = default;
    explicit EnvironmentMap(ImageD radiance) : radiance_(std::move(radiance)) { validate(); }
    EnvironmentMap(int width, int height, const Vec3 &fill = {}) : radiance_(width, height, 3) {
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) radiance_.set_rgb(x, y, fill);
        validate();
    }

    int width() const { return radiance_.width(); }
    int height() const { return radiance_.height(); }
    Vec3 at(int col, int row) const { return radiance_.rgb(col, row); }
    void set(int col, int row, const Vec3 &rgb) { radiance_.set_rgb(col, row, rgb); }
    const ImageD &image() const { return radiance_; }
    ImageD &image() { return radiance_; }

    void validate() const {
        if (radiance_.channels() != 3) fail(ErrorKind::Shape, "environment map must have 3 channels");
        if (radiance_.width() < 2 || radiance_.height() < 1)
            fail(ErrorKind::Shape, "environment map needs W >= 2 and H >= 1");
        for (double v : radiance_.data())
            if (!std::isfinite(v) || v < 0) fail(ErrorKind::Precondition, "environment radiance must be finite and >= 0");
    }

    double max_value() const {
        double m = 0;
        for (double v : radiance_.data()) m = std::max(m, v);
        return m;
    }

    EnvironmentMap scaled(double s) const {
        EnvironmentMap out = *this;
        for (double &v : out.radiance_.data()) v *= s;
        return out;
    }

  private:
    ImageD radiance_;
};

struct PixelCoord {
    int row, col;
    bool operator==(const PixelCoord &) const = default;
};

inline Vec3 direction_from_angles(double theta, double phi) {
    const double st = std::sin(theta);
    return {st * std::cos(phi), std::cos(theta), st * std::sin(phi)};
}

inline Vec3 direction_from_pixel(int width, int height, int row, int col, double du = 0.5, double dv = 0.5) {
    if (row < 0 || row >= height || col < 0 || col >= width)
        fail(ErrorKind::Bounds, "pixel (" + std::to_string(row) + "," + std::to_string(col) + ") outside " +
                                    std::to_string(width) + "x" + std::to_string(height));
    const double theta = kPi * (row + dv) / height;
    const double phi = 2 * kPi * (col + du) / width;
    return direction_from_angles(theta, phi);
}

inline Vec3 direction_from_pixel(const EnvironmentMap &map, int row, int col, double du = 0.5, double dv = 0.5) {
    return direction_from_pixel(map.width(), map.height(), row, col, du, dv);
}

// theta in [0, pi], phi in [0, 2 pi).
inline void angles_from_direction(const Vec3 &d, double &theta, double &phi) {
    theta = std::acos(std::clamp(d.y / length(d), -1.0, 1.0));
    phi = std::atan2(d.z, d.x);
    if (phi < 0) phi += 2 * kPi;
    if (phi >= 2 * kPi) phi = 0;
}

inline PixelCoord pixel_from_direction(int width, int height, const Vec3 &d) {
    double theta, phi;
    angles_from_direction(d, theta, phi);
    const int row = std::clamp(static_cast<int>(std::floor(theta / kPi * height)), 0, height - 1);
    const int col = std::clamp(static_cast<int>(std::floor(phi / (2 * kPi) * width)), 0, width - 1);
    return {row, col};
}

inline PixelCoord pixel_from_direction(const EnvironmentMap &map, const Vec3 &d) {
    return pixel_from_direction(map.width(), map.height(), d);
}

// Piecewise-constant lookup (the radiance function the sampler integrates).
inline Vec3 lookup_nearest(const EnvironmentMap &map, const Vec3 &d) {
    const PixelCoord p = pixel_from_direction(map, d);
    return map.at(p.col, p.row);
}

// Bilinear lookup with horizontal wraparound and vertical clamp.
inline Vec3 lookup_bilinear(const EnvironmentMap &map, const Vec3 &d) {
    double theta, phi;
    angles_from_direction(d, theta, phi);
    const int w = map.width(), h = map.height();
    const double fx = phi / (2 * kPi) * w - 0.5;
    const double fy = std::clamp(theta / kPi * h - 0.5, 0.0, double(h - 1));
    const int x0 = static_cast<int>(std::floor(fx));
    const int y0 = static_cast<int>(std::floor(fy));
    const double tx = fx - x0, ty = fy - y0;
    const int xa = ((x0 % w) + w) % w, xb = (xa + 1) % w;
    const int y1 = std::min(y0 + 1, h - 1);
    return (1 - ty) * ((1 - tx) * map.at(xa, y0) + tx * map.at(xb, y0)) +
           ty * ((1 - tx) * map.at(xa, y1) + tx * map.at(xb, y1));
}

// Per-pixel solid angle in steradians; constant along a row.
class SolidAngleWeights {
  public:
    SolidAngleWeights(int width, int height) : width_(width), height_(height), row_(height) {
        if (width < 2 || height < 1) fail(ErrorKind::Shape, "solid angle grid needs W >= 2 and H >= 1");
        const double dphi = 2 * kPi / width;
        for (int r = 0; r < height; ++r) {
            const double top = kPi * r / height, bottom = kPi * (r + 1) / height;
            row_[r] = dphi * (std::cos(top) - std::cos(bottom));
        }
    }

    int width() const { return width_; }
    int height() const { return height_; }
    double operator()(int row, int /*col*/ = 0) const { return row_[row]; }
    double row_weight(int row) const { return row_[row]; }

    double total() const {
        double s = 0;
        for (double w : row_) s += w * width_;
        return s;
    }

  private:
    int width_, height_;
    std::vector<double> row_;
};

inline SolidAngleWeights solid_angle_weights(int width, int height) { return SolidAngleWeights(width, height); }

// Circular shift along the azimuth by W * degrees / 360 columns; out(col) = in(col - shift).
// Integer shifts copy values exactly; fractional shifts interpolate linearly with wraparound.
inline EnvironmentMap rotate_yaw(const EnvironmentMap &map, double degrees) {
    const int w = map.width(), h = map.height();
    double shift = std::fmod(w * degrees / 360.0, double(w));
    if (shift < 0) shift += w;
    const double rounded = std::round(shift);
    EnvironmentMap out = map;
    if (std::abs(shift - rounded) < 1e-9) {
        const int s = static_cast<int>(rounded) % w;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) out.set((x + s) % w, y, map.at(x, y));
        return out;
    }
    const int base = static_cast<int>(std::floor(shift));
    const double frac = shift - base;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            // out(x) = in(x - shift) = (1 - frac) * in(x - base) + frac * in(x - base - 1)
            const int a = ((x - base) % w + w) % w;
            const int b = (a - 1 + w) % w;
            out.set(x, y, (1 - frac) * map.at(a, y) + frac * map.at(b, y));
        }
    return out;
}

namespace detail {

inline bool power_of_two_ratio(int big, int small, int &levels) {
    if (small <= 0 || big % small != 0) return false;
    int r = big / small;
    levels = 0;
    while (r > 1) {
        if (r % 2) return false;
        r /= 2;
        ++levels;
    }
    return true;
}

constexpr double kBinomial5[5] = {1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0, 1 / 16.0};

}  // namespace detail

// One 2x reduction along the requested axes with the [1 4 6 4 1]/16 kernel.
// Horizontal taps wrap around; vertical taps clamp at the poles.
inline EnvironmentMap pyramid_reduce(const EnvironmentMap &map, bool reduce_x, bool reduce_y) {
    const int w = map.width(), h = map.height();
    const ImageD &src = map.image();
    ImageD tmp = src;
    if (reduce_x) {
        const int ow = w / 2;
        tmp = ImageD(ow, h, 3);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < ow; ++x)
                for (int c = 0; c < 3; ++c) {
                    double acc = 0;
                    for (int k = -2; k <= 2; ++k) acc += detail::kBinomial5[k + 2] * src(((2 * x + k) % w + w) % w, y, c);
                    tmp(x, y, c) = acc;
                }
    }
    ImageD out = tmp;
    if (reduce_y) {
        const int tw = tmp.width(), oh = h / 2;
        out = ImageD(tw, oh, 3);
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < tw; ++x)
                for (int c = 0; c < 3; ++c) {
                    double acc = 0;
                    for (int k = -2; k <= 2; ++k) acc += detail::kBinomial5[k + 2] * tmp(x, std::clamp(2 * y + k, 0, h - 1), c);
                    out(x, y, c) = acc;
                }
    }
    return EnvironmentMap(std::move(out));
}

// Gaussian pyramid down to (target_w, target_h). Each axis ratio must be a power of two.
inline EnvironmentMap downsample_pyramid(const EnvironmentMap &map, int target_w, int target_h) {
    int lx = 0, ly = 0;
    if (!detail::power_of_two_ratio(map.width(), target_w, lx) || !detail::power_of_two_ratio(map.height(), target_h, ly))
        fail(ErrorKind::Shape, "cannot reduce " + std::to_string(map.width()) + "x" + std::to_string(map.height()) +
                                   " to " + std::to_string(target_w) + "x" + std::to_string(target_h) +
                                   " by powers of two");
    if (target_w < 2) fail(ErrorKind::Shape, "target width must be >= 2");
    EnvironmentMap cur = map;
    while (lx > 0 || ly > 0) {
        cur = pyramid_reduce(cur, lx > 0, ly > 0);
        if (lx > 0) --lx;
        if (ly > 0) --ly;
    }
    return cur;
}

}  // namespace relight
