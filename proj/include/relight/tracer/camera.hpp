// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/core/vec.hpp>

#include <cmath>

namespace relight {

struct Ray {
    Vec3 origin;
    Vec3 dir;
};

// Pixel-aligned orthographic view. `right` and `up` span half the view rectangle;
// pixel (x, y) has its ray origin at the pixel center on that rectangle, row 0 at the top,
// and every ray travels along `forward`.
struct OrthoCamera {
    int image_w = 0, image_h = 0;
    Vec3 center;
    Vec3 right;
    Vec3 up;
    Vec3 forward;

    void validate() const {
        if (image_w <= 0 || image_h <= 0) fail(ErrorKind::Precondition, "camera raster must be non-empty");
        if (std::abs(length(forward) - 1) > 1e-6) fail(ErrorKind::Precondition, "camera forward must be unit length");
        if (!(length(right) > 0) || !(length(up) > 0)) fail(ErrorKind::Precondition, "camera extents must be positive");
        const double tol = 1e-6;
        if (std::abs(dot(right, up)) > tol * length(right) * length(up) ||
            std::abs(dot(right, forward)) > tol * length(right) || std::abs(dot(up, forward)) > tol * length(up))
            fail(ErrorKind::Precondition, "camera axes must be mutually orthogonal");
    }

    Ray primary_ray(int x, int y) const {
        const double sx = 2.0 * (x + 0.5) / image_w - 1.0;
        const double sy = 1.0 - 2.0 * (y + 0.5) / image_h;
        return {center + right * sx + up * sy, forward};
    }

    // Continuous raster coordinates (pixel centers at +0.5) of a world point.
    void project(const Vec3 &p, double &px, double &py) const {
        const Vec3 d = p - center;
        const double sx = dot(d, right) / dot(right, right);
        const double sy = dot(d, up) / dot(up, up);
        px = (sx + 1.0) * 0.5 * image_w;
        py = (1.0 - sy) * 0.5 * image_h;
    }

    // Raster pixels per scene unit along `right`.
    double pixels_per_unit() const { return image_w / (2.0 * length(right)); }
};

}  // namespace relight
