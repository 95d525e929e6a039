// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/core/error.hpp>
#include <relight/core/vec.hpp>
#include <relight/tracer/camera.hpp>

#include <algorithm>
#include <cmath>

namespace relight {

struct Pose {
    double pitch_deg = 0;
    double yaw_deg = 0;
    double scale = 1;
};

// Orbit camera around the bounds center. At pitch = yaw = 0 the camera sits on +Z looking
// along -Z with +Y up; yaw turns the orbit about +Y, positive pitch raises the camera.
// The view rectangle's half extent along the longer raster side is (bounding radius / scale).
inline OrthoCamera camera_from_pose(const Pose &pose, const Bounds3 &bounds, int width, int height) {
    const double diag = bounds.empty() ? 0.0 : bounds.diagonal();
    if (!(diag > 0) || !std::isfinite(diag)) fail(ErrorKind::Structural, "mesh bounds have zero or non-finite extent");
    if (!(pose.scale > 0)) fail(ErrorKind::Config, "pose scale must be > 0");
    if (!(std::abs(pose.pitch_deg) < 90)) fail(ErrorKind::Config, "pose pitch must lie in (-90, 90) degrees");
    if (width <= 0 || height <= 0) fail(ErrorKind::Config, "raster must be non-empty");
    const double radius = 0.5 * diag;
    const double pitch = pose.pitch_deg * kPi / 180, yaw = pose.yaw_deg * kPi / 180;
    const Vec3 to_camera{std::sin(yaw) * std::cos(pitch), std::sin(pitch), std::cos(yaw) * std::cos(pitch)};
    const Vec3 forward = -to_camera;
    const Vec3 right = normalize(cross(forward, Vec3{0, 1, 0}));
    const Vec3 up = cross(right, forward);
    const double half = radius / pose.scale;
    const double longer = std::max(width, height);
    OrthoCamera cam;
    cam.image_w = width;
    cam.image_h = height;
    cam.forward = forward;
    cam.right = right * (half * width / longer);
    cam.up = up * (half * height / longer);
    cam.center = bounds.center() + to_camera * (2.0 * radius);
    return cam;
}

}  // namespace relight
