// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/envlight/envmap.hpp>

#include <cmath>

namespace relight {

// Synthetic outdoor-like HDR panorama: a sky gradient, a warm ground, and a sun lobe of
// angular radius sun_radius (radians) around sun_dir carrying sun_radiance.
inline EnvironmentMap make_sky(int width, int height, const Vec3 &sun_dir, double sun_radiance = 40.0,
                               double sun_radius = 0.12) {
    EnvironmentMap map(width, height);
    const Vec3 sd = normalize(sun_dir);
    const double cos_r = std::cos(sun_radius);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) {
            const Vec3 d = direction_from_pixel(map, r, c);
            Vec3 L;
            if (d.y >= 0) {
                const double t = d.y;
                L = Vec3{0.55, 0.70, 1.00} * (0.6 + 0.8 * t) + Vec3{0.9, 0.85, 0.8} * (0.4 * (1 - t) * (1 - t));
            } else {
                L = Vec3{0.35, 0.30, 0.22} * (0.5 + 0.5 * (1 + d.y));
            }
            const double cs = dot(d, sd);
            if (cs > cos_r) {
                const double x = (1 - cs) / (1 - cos_r);
                L += Vec3{1.0, 0.92, 0.80} * (sun_radiance * (1 - x));
            }
            map.set(c, r, L);
        }
    return map;
}

// Constant radiance everywhere except one texel.
inline EnvironmentMap make_single_texel(int width, int height, int row, int col, const Vec3 &radiance,
                                        const Vec3 &background = {}) {
    EnvironmentMap map(width, height, background);
    map.set(col, row, radiance);
    return map;
}

}  // namespace relight
